"""
Mutual-information terms of the fading interference-relay channel.

Every term is an ergodic conditional mutual information I(A; Y_O | X_C, H)
with Gaussian inputs. Three evaluation routes are provided:

* phase fading, independent inputs: exact expressions, with a periodic
  trapezoid average over the residual relative phases when the effective
  channel has rank two;
* Rayleigh fading, independent inputs: expectations of log(1 + sum of
  weighted exponentials) in closed form (one or two variables) or by
  Gauss-Laguerre quadrature over the remaining variables; rank-two terms
  fall back to seeded Monte Carlo;
* any fading model and any input covariance: Monte Carlo average of the
  Gaussian log-det formula with Schur-complement conditioning.

All values are in bits per channel use.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .channel_model import (LINKS, PHASE, RAYLEIGH, fading_model,
                            attenuation_vector, unit_fading)
from .special_fn import e1_scaled

LOG2E = 1.0 / math.log(2.0)

CLOSED_FORM = "ClosedForm"
QUADRATURE = "Quadrature"
MONTE_CARLO = "MonteCarlo"

DEFAULT_MC_SAMPLES = 100_000
DEFAULT_GL_NODES = 64
_MC_CHUNK = 50_000


class UnsupportedTerm(ValueError):
    """The requested term has no evaluator for the chosen route."""


# -- terms ------------------------------------------------------------------

DESIRED = "DesiredWithRelay"
INTERF_NOISE = "InterfAsNoise"
INTERF_COND = "InterfConditioned"
SUM_ALL = "SumAll"
SRC_RX1_RELAY = "SourceToRx1AndRelay"
CROSS_RELAY = "CrossWithRelay"
SRC_OPP_ALL = "SourceAtOppConditionedAll"
JOINT_RX1_RELAY = "JointToRx1Relay"
SRC_ALL = "SourceToAllOutputs"
JOINT_ALL = "JointToAllOutputs"
SUM_RX_PAIR = "SumAtRxPair"
RELAY_PAIR_RX_PAIR = "RelayPairAtRxPair"

_TAGS = (DESIRED, INTERF_NOISE, INTERF_COND, SUM_ALL, SRC_RX1_RELAY,
         CROSS_RELAY, SRC_OPP_ALL, JOINT_RX1_RELAY, SRC_ALL, JOINT_ALL,
         SUM_RX_PAIR, RELAY_PAIR_RX_PAIR)
_PAIR_TAGS = (INTERF_NOISE, INTERF_COND, CROSS_RELAY)
_SINGLE_TAGS = (DESIRED, SUM_ALL, SRC_RX1_RELAY, SRC_OPP_ALL, SRC_ALL,
                RELAY_PAIR_RX_PAIR)


def _other(k):
    return 3 - k


@dataclass(frozen=True)
class MITerm:
    """A named mutual-information term.

    ``k`` is the source (or receiver, for SumAll) index and ``j`` the
    receiver index of cross terms, both in {1, 2}.
    """

    tag: str
    k: int = 1
    j: int = 0

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise UnsupportedTerm(f"unknown term {self.tag!r}")
        if self.tag in _PAIR_TAGS:
            if {self.k, self.j} != {1, 2}:
                raise UnsupportedTerm(f"{self.tag} needs k, j in {{1, 2}}, k != j")
        elif self.k not in (1, 2):
            raise UnsupportedTerm(f"{self.tag} needs k in {{1, 2}}")

    @property
    def name(self):
        if self.tag in _PAIR_TAGS:
            return f"{self.tag}({self.k}->{self.j})"
        if self.tag in _SINGLE_TAGS:
            return f"{self.tag}({self.k})"
        return self.tag

    def subsets(self):
        """(inputs of interest, conditioned inputs, outputs) as index tuples."""
        k, j = self.k, self.j
        o = _other(k)
        t = self.tag
        if t == DESIRED:
            return (k, 3), (o,), (k,)
        if t == INTERF_NOISE:
            return (k,), (), (j,)
        if t == INTERF_COND:
            return (k,), (_other(k),), (j,)
        if t == SUM_ALL:
            return (1, 2, 3), (), (k,)
        if t == SRC_RX1_RELAY:
            return (k,), (o, 3), (1, 3)
        if t == CROSS_RELAY:
            return (k, 3), (o,), (j,)
        if t == SRC_OPP_ALL:
            return (k,), (o, 3), (o,)
        if t == JOINT_RX1_RELAY:
            return (1, 2), (3,), (1, 3)
        if t == SRC_ALL:
            return (k,), (o, 3), (1, 2, 3)
        if t == JOINT_ALL:
            return (1, 2), (3,), (1, 2, 3)
        if t == SUM_RX_PAIR:
            return (1, 2, 3), (), (1, 2)
        if t == RELAY_PAIR_RX_PAIR:
            return (k, 3), (o,), (1, 2)
        raise UnsupportedTerm(t)  # pragma: no cover


def desired(k):
    return MITerm(DESIRED, k)


def interf_as_noise(k, j):
    return MITerm(INTERF_NOISE, k, j)


def interf_conditioned(k, j):
    return MITerm(INTERF_COND, k, j)


def sum_all(k):
    return MITerm(SUM_ALL, k)


def source_to_rx1_relay(k):
    return MITerm(SRC_RX1_RELAY, k)


def cross_with_relay(k, j):
    return MITerm(CROSS_RELAY, k, j)


def source_at_opp_all(k=1):
    return MITerm(SRC_OPP_ALL, k)


def source_to_all(k):
    return MITerm(SRC_ALL, k)


def relay_pair_at_rx_pair(k):
    return MITerm(RELAY_PAIR_RX_PAIR, k)


JOINT_TO_RX1_RELAY = MITerm(JOINT_RX1_RELAY)
JOINT_TO_ALL = MITerm(JOINT_ALL)
SUM_AT_RX_PAIR = MITerm(SUM_RX_PAIR)


def all_terms():
    """One instance of every term (both user indices where applicable)."""
    out = []
    for tag in _TAGS:
        if tag in _PAIR_TAGS:
            out += [MITerm(tag, 1, 2), MITerm(tag, 2, 1)]
        elif tag in _SINGLE_TAGS:
            out += [MITerm(tag, 1), MITerm(tag, 2)]
        else:
            out.append(MITerm(tag))
    return out


def cut_set_terms():
    """The five cut-set bound terms of the full-feedback channel."""
    return [source_to_all(1), desired(1), source_to_all(2), desired(2),
            JOINT_TO_ALL]


def parse_term(text):
    """Parse 'DesiredWithRelay(1)', 'InterfAsNoise(2->1)' or a bare tag."""
    text = text.strip()
    if "(" not in text:
        return MITerm(text)
    tag, rest = text.split("(", 1)
    inner = rest.rstrip(")").strip()
    if "->" in inner:
        k, j = (int(s) for s in inner.split("->"))
        return MITerm(tag.strip(), k, j)
    return MITerm(tag.strip(), int(inner))


@dataclass(frozen=True)
class MIEstimate:
    value: float
    std_error: float = 0.0
    n_samples: int = 0
    method: str = CLOSED_FORM
    seed: int = None

    def as_dict(self):
        d = {"value": self.value, "std_error": self.std_error,
             "n_samples": self.n_samples, "method": self.method}
        if self.seed is not None:
            d["seed"] = self.seed
        return d


# -- input covariance -------------------------------------------------------

class InputCovariance:
    """3x3 Hermitian psd covariance of (X1, X2, X3)."""

    def __init__(self, matrix, powers=None, tol=1e-9):
        C = np.asarray(matrix, dtype=complex)
        if C.shape != (3, 3):
            raise ValueError("input covariance must be 3x3")
        if not np.allclose(C, C.conj().T, atol=tol * max(1.0, np.abs(C).max())):
            raise ValueError("input covariance must be Hermitian")
        C = 0.5 * (C + C.conj().T)
        w = np.linalg.eigvalsh(C)
        if w.min() < -tol * max(1.0, w.max()):
            raise ValueError("input covariance must be positive semidefinite")
        if powers is not None:
            d = np.real(np.diag(C))
            if np.any(d > np.asarray(powers, float) * (1 + tol) + tol):
                raise ValueError("diagonal exceeds the power constraints")
        self.matrix = C

    @classmethod
    def independent(cls, params):
        return cls(np.diag(np.asarray(params.powers, float)).astype(complex))


# -- channel matrices -------------------------------------------------------

_LINK_INDEX = {(int(n[1]), int(n[2])): i for i, n in enumerate(LINKS)}


def channel_matrices(h):
    """(n, 8) link coefficients -> (n, 3, 3) matrix H[o-1, l-1] = h_lo, h_33 = 0."""
    h = np.atleast_2d(h)
    H = np.zeros(h.shape[:-1] + (3, 3), dtype=complex)
    for (l, o), i in _LINK_INDEX.items():
        H[..., o - 1, l - 1] = h[..., i]
    return H


def _conditional_cov(K, cond):
    """Covariance of X given X_cond (zero rows/cols on cond); degenerate flag."""
    cond = [c - 1 for c in cond]
    if not cond:
        return K.copy(), False
    Kcc = K[np.ix_(cond, cond)]
    scale = max(np.abs(np.diag(Kcc)).max(), 1e-300)
    w = np.linalg.eigvalsh(Kcc)
    degenerate = bool(w.min() <= 1e-10 * scale)
    Kxc = K[:, cond]
    S = K - Kxc @ np.linalg.pinv(Kcc, rcond=1e-10, hermitian=True) @ Kxc.conj().T
    S[cond, :] = 0.0
    S[:, cond] = 0.0
    return 0.5 * (S + S.conj().T), degenerate


def _check_subsets(interest, cond, outputs):
    interest, cond, outputs = (tuple(sorted(set(s))) for s in (interest, cond, outputs))
    if set(interest) & set(cond):
        raise ValueError("inputs of interest and conditioned inputs overlap")
    for s in interest + cond + outputs:
        if s not in (1, 2, 3):
            raise ValueError(f"node index {s} outside {{1, 2, 3}}")
    return interest, cond, outputs


def _logdet2_batch(H, K, outputs):
    """log2 det(I + H_O K H_O^H) for a batch of channel matrices."""
    rows = [o - 1 for o in outputs]
    Ho = H[..., rows, :]
    M = Ho @ K @ np.conj(np.swapaxes(Ho, -1, -2))
    M = M + np.eye(len(rows))
    M = 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))
    sign, ld = np.linalg.slogdet(M)
    return ld * LOG2E


def mi_samples(H, cov, interest, cond, outputs):
    """Per-draw conditional MI (bits) for channel matrices H of shape (n, 3, 3)."""
    interest, cond, outputs = _check_subsets(interest, cond, outputs)
    K = cov.matrix if isinstance(cov, InputCovariance) else np.asarray(cov, complex)
    K_c, deg1 = _conditional_cov(K, cond)
    K_ac, deg2 = _conditional_cov(K, cond + interest)
    val = _logdet2_batch(H, K_c, outputs)
    if np.abs(K_ac).max() > 0.0:
        val = val - _logdet2_batch(H, K_ac, outputs)
    return np.maximum(val, 0.0), (deg1 or deg2)


def gaussian_mi_conditional(draw, cov, inputs_of_interest, conditioned_inputs,
                            outputs, return_flag=False):
    """I(X_A; Y_O | X_C, H = draw) in bits for jointly Gaussian inputs.

    Computed as log2 det(I + H_O K_{|C} H_O^H) - log2 det(I + H_O K_{|A,C} H_O^H),
    where K_{|S} is the Schur-complement covariance of the inputs given X_S
    and inputs in neither set act as Gaussian noise. With A and C covering
    all three inputs the second term vanishes. A singular conditioned block
    is handled by pseudo-inverse; ``return_flag`` also returns whether that
    happened.
    """
    h = draw.as_array() if hasattr(draw, "as_array") else np.asarray(draw, complex)
    H = channel_matrices(h[None, :])
    vals, degenerate = mi_samples(H, cov, inputs_of_interest, conditioned_inputs,
                                  outputs)
    value = float(vals[0])
    return (value, degenerate) if return_flag else value


# -- phase fading -----------------------------------------------------------

def _g(params, l, o):
    if (l, o) == (3, 3):
        return 0.0
    return params.gain(l, o)


def _amp(params, l, o):
    if (l, o) == (3, 3):
        return 0.0
    return params.a(l, o)


def _periodic_mean(f, dims, tol=1e-13, n0=32, n_max=4096):
    """Mean of a smooth 2*pi-periodic function over a 1- or 2-torus."""
    prev = None
    n = n0
    while True:
        t = 2.0 * np.pi * np.arange(n) / n
        if dims == 1:
            val = float(np.mean(f(t)))
        else:
            u, v = np.meshgrid(t, t, indexing="ij")
            val = float(np.mean(f(u, v)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n >= n_max:
            return val
        prev = val
        n *= 2


def mean_log2_cosine(alpha, beta):
    """E{log2(alpha - beta cos D)} for D uniform on [0, 2 pi), by quadrature."""
    if beta == 0.0:
        return math.log2(alpha)
    return _periodic_mean(lambda t: np.log2(alpha - beta * np.cos(t)), 1)


def mean_log2_cosine_exact(alpha, beta):
    """Closed form of the same average: log2((alpha + sqrt(alpha^2 - beta^2)) / 2)."""
    beta = abs(beta)
    return math.log2(0.5 * (alpha + math.sqrt(alpha * alpha - beta * beta)))


def phase_logdet(params, inputs, outputs):
    """E log2 det(I + H_O diag(P_inputs) H_O^H) under phase fading.

    The expectation is over the independent uniform link phases. Channels of
    rank one are exact; rank-two channels reduce (by Cauchy-Binet) to an
    average over one or two relative phases.
    """
    inputs, outputs = tuple(inputs), tuple(outputs)
    if not inputs or not outputs:
        return 0.0
    base = 1.0 + sum(_g(params, l, o) for l in inputs for o in outputs)
    if len(inputs) == 1 or len(outputs) == 1:
        return math.log2(base)
    if len(inputs) > 3 or len(outputs) > 3 or (len(inputs) == 3 and len(outputs) == 3):
        raise UnsupportedTerm("phase evaluation supports at most rank-2 channels")

    # 2x2 minors: |h_lo h_mp - h_lp h_mo|^2 = A^2 + B^2 - 2AB cos(angle)
    if len(inputs) == 2:
        l, m = inputs
        pairs = list(itertools.combinations(outputs, 2))
        scale = params.power(l) * params.power(m)

        def coeffs(o, p):
            return (_amp(params, l, o) * _amp(params, m, p),
                    _amp(params, l, p) * _amp(params, m, o))
    else:
        o, p = outputs
        pairs = list(itertools.combinations(inputs, 2))

        def coeffs(l, m, o=o, p=p):
            return (_amp(params, l, o) * _amp(params, m, p),
                    _amp(params, m, o) * _amp(params, l, p))

    alpha = base
    betas = []
    for pair in pairs:
        A, B = coeffs(*pair)
        s = scale if len(inputs) == 2 else params.power(pair[0]) * params.power(pair[1])
        alpha += s * (A * A + B * B)
        betas.append(2.0 * s * A * B)
    if len(betas) == 1:
        return mean_log2_cosine(alpha, betas[0])
    # three minors whose angles are pairwise differences of three independent
    # uniform phases phi_1, phi_2, phi_3: (1,2) -> u - v, (1,3) -> u, (2,3) -> v
    b12, b13, b23 = betas
    if b12 == 0.0 and b13 == 0.0 and b23 == 0.0:
        return math.log2(alpha)
    return _periodic_mean(
        lambda u, v: np.log2(alpha - b13 * np.cos(u) - b23 * np.cos(v)
                             - b12 * np.cos(u - v)), 2)


def _noise_inputs(interest, cond):
    return tuple(l for l in (1, 2, 3) if l not in interest and l not in cond)


def _phase_subset(params, interest, cond, outputs):
    noise = _noise_inputs(interest, cond)
    full = tuple(sorted(interest + noise))
    value = phase_logdet(params, full, outputs) - phase_logdet(params, noise, outputs)
    rank2 = min(len(full), len(outputs)) >= 2
    return MIEstimate(max(value, 0.0), 0.0, 0, QUADRATURE if rank2 else CLOSED_FORM)


def phase_mi(term, params):
    """Exact (or deterministic-quadrature) value of ``term`` under phase fading."""
    return _phase_subset(params, *term.subsets())


# -- Rayleigh fading ---------------------------------------------------------

_GL_CACHE = {}


def _gauss_laguerre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.laguerre.laggauss(n)
    return _GL_CACHE[n]


def _mean_ln1p_two(c1, c2, offset=1.0):
    """E ln(offset + c1 X1 + c2 X2) for independent unit exponentials."""
    base = math.log(offset)
    if c1 == 0.0 and c2 == 0.0:
        return base
    if c1 == 0.0 or c2 == 0.0:
        c = max(c1, c2)
        return base + e1_scaled(offset / c)
    hi, lo = max(c1, c2), min(c1, c2)
    if (hi - lo) <= 1e-4 * hi:
        # Gamma(2) sum; symmetric in (c1, c2) so the midpoint error is O(delta^2)
        y = offset / (0.5 * (hi + lo))
        return base + (1.0 - y) * e1_scaled(y) + 1.0
    return base + (hi * e1_scaled(offset / hi) - lo * e1_scaled(offset / lo)) / (hi - lo)


def mean_log2_expsum(coeffs, nodes=DEFAULT_GL_NODES, offset=1.0):
    """E log2(offset + sum_i c_i X_i), X_i independent Exp(1).

    One or two nonzero coefficients are handled in closed form through
    e^x E1(x); each further variable is integrated by Gauss-Laguerre
    quadrature, always over the smallest coefficient so the integrand stays
    slowly varying.
    """
    c = sorted(float(x) for x in coeffs if x > 0.0)
    return _mean_ln_expsum(c, nodes, offset) * LOG2E


def _mean_ln_expsum(c, nodes, offset):
    if len(c) <= 2:
        c = [0.0] * (2 - len(c)) + c
        return _mean_ln1p_two(c[0], c[1], offset)
    x, w = _gauss_laguerre(nodes)
    head, rest = c[0], c[1:]
    vals = [_mean_ln_expsum(rest, nodes, offset + head * xi) for xi in x]
    return float(np.dot(w, vals))


def _rank_one_coeffs(params, inputs, outputs):
    return [_g(params, l, o) for l in inputs for o in outputs]


def _is_rank_one(inputs, outputs):
    return len(inputs) <= 1 or len(outputs) <= 1


def _rayleigh_subset(params, interest, cond, outputs, nodes, n, seed):
    noise = _noise_inputs(interest, cond)
    full = tuple(sorted(interest + noise))
    if _is_rank_one(full, outputs) and _is_rank_one(noise, outputs):
        coeffs = _rank_one_coeffs(params, full, outputs)
        v = (mean_log2_expsum(coeffs, nodes)
             - mean_log2_expsum(_rank_one_coeffs(params, noise, outputs), nodes))
        n_exp = sum(1 for c in coeffs if c > 0)
        method = CLOSED_FORM if n_exp <= 2 else QUADRATURE
        return MIEstimate(max(v, 0.0), 0.0, 0, method)
    return mc_mi((interest, cond, outputs), RAYLEIGH, params, n=n, seed=seed)


def rayleigh_mi(term, params, nodes=DEFAULT_GL_NODES, n=DEFAULT_MC_SAMPLES, seed=0):
    """Ergodic value of ``term`` under Rayleigh fading with independent inputs.

    Terms whose log-det arguments are sums of independent exponentials use
    closed forms plus Gauss-Laguerre quadrature; the remaining terms (those
    with a rank-two channel) use seeded Monte Carlo with ``n`` draws.
    """
    return _rayleigh_subset(params, *term.subsets(), nodes, n, seed)


# -- Monte Carlo -------------------------------------------------------------

def _as_subsets(term):
    if isinstance(term, MITerm):
        return term.subsets()
    interest, cond, outputs = term
    return _check_subsets(interest, cond, outputs)


def mc_samples(term, model, params, cov=None, n=DEFAULT_MC_SAMPLES, seed=0, start=0):
    """Per-draw MI values (bits) for draws start .. start+n-1 of stream ``seed``."""
    interest, cond, outputs = _as_subsets(term)
    if cov is None:
        cov = InputCovariance.independent(params)
    a = attenuation_vector(params)
    out = np.empty(n)
    for s in range(0, n, _MC_CHUNK):
        m = min(_MC_CHUNK, n - s)
        h = unit_fading(model, seed, m, start + s) * a
        out[s:s + m], _ = mi_samples(channel_matrices(h), cov, interest, cond, outputs)
    return out


def mc_mi(term, model, params, cov=None, n=DEFAULT_MC_SAMPLES, seed=0, start=0):
    """Monte Carlo estimate of a term (or raw ``(interest, cond, outputs)``).

    Uses draws ``start .. start + n - 1`` of stream ``seed``.
    """
    if n < 1000:
        raise ValueError("Monte Carlo needs n >= 1000 samples")
    model = fading_model(model)
    x = mc_samples(term, model, params, cov, n, seed, start)
    return MIEstimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)), n,
                      MONTE_CARLO, seed)


def subset_mi(model, params, interest, cond, outputs, n=DEFAULT_MC_SAMPLES, seed=0):
    """I(X_interest; Y_outputs | X_cond, H) for independent max-power inputs."""
    interest, cond, outputs = _check_subsets(interest, cond, outputs)
    if fading_model(model) == PHASE:
        return _phase_subset(params, interest, cond, outputs)
    return _rayleigh_subset(params, interest, cond, outputs, DEFAULT_GL_NODES, n, seed)


def evaluate(term, model, params, n=DEFAULT_MC_SAMPLES, seed=0):
    """Evaluate ``term`` with independent max-power inputs under ``model``."""
    model = fading_model(model)
    if model == PHASE:
        return phase_mi(term, params)
    return rayleigh_mi(term, params, n=n, seed=seed)
