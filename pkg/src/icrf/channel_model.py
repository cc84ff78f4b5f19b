"""
Scenario description, geometry-to-attenuation mapping and fading draws for the
two-user interference channel with a relay.

Node indices: 1 = Tx1, 2 = Tx2, 3 = relay (as transmitter); receivers are
1 = Rx1, 2 = Rx2, 3 = relay (as receiver). Link ``lk`` goes from transmitter
``l`` to receiver ``k``. The relay does not hear itself, so there are eight
links. Noise is unit-variance CN(0, 1) at every receiver.
"""

from dataclasses import dataclass, fields, replace
import math

import numpy as np

LINKS = ("a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32")

PHASE = "PhaseFading"
RAYLEIGH = "RayleighFading"
FADING_MODELS = (PHASE, RAYLEIGH)

_MODEL_ALIASES = {"phase": PHASE, "rayleigh": RAYLEIGH,
                  PHASE.lower(): PHASE, RAYLEIGH.lower(): RAYLEIGH}


class DegenerateGeometry(ValueError):
    """Two nodes share a position, so a distance-based attenuation is undefined."""


class ScenarioError(ValueError):
    """Malformed or invalid scenario description."""


def fading_model(name):
    """Normalize a fading model name ('phase', 'rayleigh' or the full tag)."""
    try:
        return _MODEL_ALIASES[str(name).lower()]
    except KeyError:
        raise ScenarioError(f"unknown fading model {name!r}") from None


@dataclass(frozen=True)
class NetworkParams:
    """Eight amplitude attenuations a_lk and the three transmit powers."""

    a11: float = 0.0
    a12: float = 0.0
    a13: float = 0.0
    a21: float = 0.0
    a22: float = 0.0
    a23: float = 0.0
    a31: float = 0.0
    a32: float = 0.0
    P1: float = 0.0
    P2: float = 0.0
    P3: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float, np.floating, np.integer)):
                raise ScenarioError(f"{f.name} must be a real number")
            v = float(v)
            if not math.isfinite(v) or v < 0.0:
                raise ScenarioError(f"{f.name} must be finite and >= 0, got {v}")
            object.__setattr__(self, f.name, v)

    def a(self, l, k):
        """Attenuation of link l -> k (a33 does not exist)."""
        if (l, k) == (3, 3):
            raise KeyError("the relay has no self link")
        return getattr(self, f"a{l}{k}")

    def power(self, k):
        return (self.P1, self.P2, self.P3)[k - 1]

    def gain(self, l, k):
        """Mean received SNR a_lk^2 P_l of link l -> k."""
        return self.a(l, k) ** 2 * self.power(l)

    @property
    def powers(self):
        return (self.P1, self.P2, self.P3)

    def attenuations(self):
        return {name: getattr(self, name) for name in LINKS}

    def swapped(self):
        """Relabel user 1 <-> user 2 (Tx1<->Tx2 and Rx1<->Rx2)."""
        return NetworkParams(
            a11=self.a22, a12=self.a21, a13=self.a23,
            a21=self.a12, a22=self.a11, a23=self.a13,
            a31=self.a32, a32=self.a31,
            P1=self.P2, P2=self.P1, P3=self.P3)

    def with_powers(self, P1, P2, P3):
        return replace(self, P1=P1, P2=P2, P3=P3)


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


@dataclass(frozen=True)
class Layout:
    """Fixed node positions; amplitude attenuation is d^(-amplitude_exponent)."""

    tx1: tuple = (0.0, 1.0)
    tx2: tuple = (0.0, -1.0)
    rx1: tuple = (1.9044, -0.389)
    rx2: tuple = (1.9044, 0.389)
    amplitude_exponent: float = 2.0

    def __post_init__(self):
        for name in ("tx1", "tx2", "rx1", "rx2"):
            p = tuple(float(c) for c in getattr(self, name))
            if len(p) != 2 or not all(math.isfinite(c) for c in p):
                raise ScenarioError(f"{name} must be a finite 2D point")
            object.__setattr__(self, name, p)
        if not self.amplitude_exponent > 0:
            raise ScenarioError("amplitude_exponent must be positive")
        pts = self.nodes()
        names = list(pts)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if _dist(pts[names[i]], pts[names[j]]) == 0.0:
                    raise DegenerateGeometry(
                        f"{names[i]} and {names[j]} are coincident")

    def nodes(self):
        return {"tx1": self.tx1, "tx2": self.tx2, "rx1": self.rx1, "rx2": self.rx2}

    def mirrored(self):
        """Reflect about y = 0 and swap the user labels."""
        def flip(p):
            return (p[0], -p[1])
        return Layout(tx1=flip(self.tx2), tx2=flip(self.tx1),
                      rx1=flip(self.rx2), rx2=flip(self.rx1),
                      amplitude_exponent=self.amplitude_exponent)


DEFAULT_LAYOUT = Layout()


def attenuation_from_geometry(layout, relay_pos, powers=(0.0, 0.0, 0.0)):
    """Map node positions to the eight link attenuations a_lk = d_lk^(-exponent).

    Raises
    ------
    DegenerateGeometry
        If the relay sits exactly on one of the four terminals.
    """
    relay = (float(relay_pos[0]), float(relay_pos[1]))
    e = layout.amplitude_exponent
    for name, p in layout.nodes().items():
        if _dist(p, relay) == 0.0:
            raise DegenerateGeometry(f"relay coincides with {name}")

    def att(p, q):
        return _dist(p, q) ** (-e)

    P1, P2, P3 = powers
    return NetworkParams(
        a11=att(layout.tx1, layout.rx1), a12=att(layout.tx1, layout.rx2),
        a13=att(layout.tx1, relay),
        a21=att(layout.tx2, layout.rx1), a22=att(layout.tx2, layout.rx2),
        a23=att(layout.tx2, relay),
        a31=att(relay, layout.rx1), a32=att(relay, layout.rx2),
        P1=P1, P2=P2, P3=P3)


# -- fading draws --------------------------------------------------------

# Each draw consumes 16 raw 64-bit words = 4 Philox counter blocks, so draw
# ``index`` of stream ``seed`` is addressed directly by advancing the counter.
_WORDS_PER_DRAW = 16
_BLOCKS_PER_DRAW = 4


@dataclass(frozen=True)
class ChannelDraw:
    h11: complex
    h12: complex
    h13: complex
    h21: complex
    h22: complex
    h23: complex
    h31: complex
    h32: complex

    def h(self, l, k):
        return getattr(self, f"h{l}{k}")

    def as_array(self):
        return np.array([getattr(self, n) for n in _H_NAMES], dtype=complex)


_H_NAMES = tuple("h" + n[1:] for n in LINKS)


def _uniforms(seed, start, n):
    """Uniforms on [0, 1) for draws start .. start+n-1, shape (n, 16)."""
    bitgen = np.random.Philox(key=int(seed) & ((1 << 128) - 1))
    bitgen.advance(_BLOCKS_PER_DRAW * int(start))
    raw = bitgen.random_raw(_WORDS_PER_DRAW * n).reshape(n, _WORDS_PER_DRAW)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def unit_fading(model, seed, n, start=0):
    """Unit-scale fading coefficients, shape (n, 8), link order as ``LINKS``.

    PhaseFading gives e^{j theta}; RayleighFading gives CN(0, 1) samples built
    from an exponential magnitude-squared and an independent uniform phase.
    """
    model = fading_model(model)
    u = _uniforms(seed, start, n)
    phase = np.exp(2j * np.pi * u[:, 0::2])
    if model == PHASE:
        return phase
    mag = np.sqrt(-np.log1p(-u[:, 1::2]))
    return mag * phase


def attenuation_vector(params):
    return np.array([getattr(params, n) for n in LINKS])


def sample_channels(model, params, seed, n, start=0):
    """Vectorized fading draws for indices start .. start+n-1, shape (n, 8)."""
    return unit_fading(model, seed, n, start) * attenuation_vector(params)


def sample_channel(model, params, rng_seed, index):
    """One fading realization, fully determined by (rng_seed, index)."""
    h = sample_channels(model, params, rng_seed, 1, start=index)[0]
    return ChannelDraw(*(complex(v) for v in h))


def apply_channel(draw, x1, x2, x3, z1=0j, z2=0j, z3=0j):
    """Received signals (y1, y2, y3); the relay output does not reach Y3."""
    y1 = draw.h11 * x1 + draw.h21 * x2 + draw.h31 * x3 + z1
    y2 = draw.h12 * x1 + draw.h22 * x2 + draw.h32 * x3 + z2
    y3 = draw.h13 * x1 + draw.h23 * x2 + z3
    return y1, y2, y3


# -- scenario JSON ---------------------------------------------------------

def params_from_dict(d, relay=None):
    """Build (NetworkParams, model) from a scenario dictionary.

    Two forms are accepted: explicit ``attenuations`` or a ``layout`` plus a
    ``relay`` position. ``relay`` overrides the scenario's own relay entry.
    """
    if not isinstance(d, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        P1, P2, P3 = (float(p) for p in d["powers"])
    except (KeyError, TypeError, ValueError):
        raise ScenarioError("scenario needs 'powers': [P1, P2, P3]") from None
    model = fading_model(d.get("model", "phase"))
    if "attenuations" in d:
        att = d["attenuations"]
        if not isinstance(att, dict):
            raise ScenarioError("'attenuations' must be an object")
        unknown = set(att) - set(LINKS)
        if unknown:
            raise ScenarioError(f"unknown attenuation keys {sorted(unknown)}")
        return NetworkParams(**{k: att.get(k, 0.0) for k in LINKS},
                             P1=P1, P2=P2, P3=P3), model
    if "layout" in d:
        layout = layout_from_dict(d["layout"])
        pos = relay if relay is not None else d.get("relay")
        if pos is None:
            raise ScenarioError("layout scenarios need a 'relay' position")
        return attenuation_from_geometry(layout, pos, (P1, P2, P3)), model
    raise ScenarioError("scenario needs 'attenuations' or 'layout'")


def layout_from_dict(d):
    if not isinstance(d, dict):
        raise ScenarioError("'layout' must be an object")
    kw = {}
    for name in ("tx1", "tx2", "rx1", "rx2"):
        if name in d:
            kw[name] = tuple(d[name])
    if "amplitude_exponent" in d:
        kw["amplitude_exponent"] = float(d["amplitude_exponent"])
    return Layout(**kw)
