"""Achievable rates and regimes of fading interference channels with a relay."""

__version__ = "0.1.0"
