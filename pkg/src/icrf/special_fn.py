"""
Exponential integral E1 and its exponentially scaled variant.

E1(x) = int_x^inf e^{-t}/t dt. The default evaluator uses the power series
for x <= 1 and a modified-Lentz continued fraction for x > 1. The scaled
form e^x E1(x) is computed without ever forming e^{-x}, so it stays finite
for arguments far beyond the underflow point of E1 itself.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

EULER_GAMMA = 0.57721566490153286061

ADAPTIVE = "AdaptiveQuadrature"
SERIES_CF = "SeriesPlusContinuedFraction"


class DomainError(ValueError):
    """Argument outside the domain of the function."""


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = SERIES_CF
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in (ADAPTIVE, SERIES_CF):
            raise ValueError(f"unknown E1 method {self.method!r}")
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ValueError("rel_tol must lie in (0, 1e-3]")


DEFAULT_SPEC = QuadratureSpec()


def _check_arg(x):
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"E1 requires x > 0, got {x!r}")
    return x


def _e1_series(x, rel_tol):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= 0.1 * rel_tol * abs(total) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x, rel_tol):
    """e^x E1(x) by the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...)))."""
    tiny = 1e-300
    eps = min(rel_tol, 1e-15) * 0.1
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _scaled_quad(x, rel_tol):
    # e^x E1(x) = int_0^inf e^{-u} / (x + u) du
    val, _ = integrate.quad(lambda u: math.exp(-u) / (x + u), 0.0, np.inf,
                            epsabs=0.0, epsrel=max(rel_tol * 0.01, 1e-14),
                            limit=500)
    return val


def e1_scaled(x, spec=DEFAULT_SPEC):
    """Return e^x * E1(x) for x > 0.

    Finite and strictly decreasing for all positive x; behaves like
    1/x - 1/x^2 for large x and like -gamma - ln(x) near zero.
    """
    x = _check_arg(x)
    if math.isinf(x):
        return 0.0
    if spec.method == ADAPTIVE:
        return _scaled_quad(x, spec.rel_tol)
    if x <= 1.0:
        return math.exp(x) * _e1_series(x, spec.rel_tol)
    return _e1_scaled_cf(x, spec.rel_tol)


def e1(x, spec=DEFAULT_SPEC):
    """Exponential integral E1(x) for x > 0 (underflows to 0 past x ~ 740)."""
    x = _check_arg(x)
    if spec.method == SERIES_CF and x <= 1.0:
        return _e1_series(x, spec.rel_tol)
    if x > 745.0:
        return 0.0
    return math.exp(-x) * e1_scaled(x, spec)


def expected_log1p_exp(c):
    """E{ln(1 + c X)} for X ~ Exp(1), equal to e^{1/c} E1(1/c); 0 when c == 0."""
    if c < 0:
        raise DomainError("coefficient must be nonnegative")
    if c == 0.0:
        return 0.0
    return e1_scaled(1.0 / c)


e1_scaled_vec = np.vectorize(e1_scaled, otypes=[float], excluded={"spec"})
