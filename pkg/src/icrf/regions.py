"""
Two-user rate regions as convex polygons, plus the asymptotic sum-rate sweep.

A region is stored as half-plane constraints ``w1 R1 + w2 R2 <= c`` with
nonnegative weights, intersected with the nonnegative quadrant. Vertices are
derived from the constraints on demand and never stored as the source of
truth.
"""

from dataclasses import dataclass, field, replace
import csv
import io
import itertools
import math

from . import mi_eval as mi
from . import regimes as rg
from .channel_model import NetworkParams, RAYLEIGH, fading_model

TOL = 1e-9

EMARC1 = "EMARC1"
EMARC2 = "EMARC2"
MARCF = "MARCF"
PEMARC = "PEMARC"


class RegimeMismatch(ValueError):
    """The scenario is not in the regime whose region was requested."""


class ConditionNotMet(ValueError):
    """A precondition of an achievable-region construction fails."""


@dataclass(frozen=True)
class Constraint:
    w1: float
    w2: float
    c: float
    label: str = ""
    std_error: float = 0.0

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or (self.w1 == 0 and self.w2 == 0):
            raise ValueError("constraint weights must be nonnegative and not both zero")
        if not math.isfinite(self.c):
            raise ValueError("constraint bound must be finite")

    def value(self, p):
        return self.w1 * p[0] + self.w2 * p[1]

    def as_dict(self):
        d = {"w": [self.w1, self.w2], "c": self.c}
        if self.label:
            d["label"] = self.label
        if self.std_error:
            d["std_error"] = self.std_error
        return d


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol=TOL):
    """Counterclockwise hull without collinear points (Andrew's monotone chain)."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull


def _dedupe(points, tol):
    out = []
    for p in points:
        if not any(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for q in out):
            out.append(p)
    return out


@dataclass(frozen=True)
class RateRegion:
    """Convex polygon {R >= 0 : w . R <= c for every constraint}."""

    constraints: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not any(c.w1 > 0 for c in cons) or not any(c.w2 > 0 for c in cons):
            raise ValueError("region must be bounded in both rates")
        object.__setattr__(self, "constraints", cons)

    @property
    def vertices(self):
        """Extreme points in counterclockwise order starting at the origin."""
        lines = [(c.w1, c.w2, max(c.c, 0.0)) for c in self.constraints]
        lines += [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]  # the axes, as R1 = 0 / R2 = 0
        cand = []
        for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(lines, 2):
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-14:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            cand.append((x, y))
        feasible = [(max(x, 0.0), max(y, 0.0)) for x, y in cand
                    if x >= -TOL and y >= -TOL and self._inside((x, y), 1e-9)]
        scale = max([1.0] + [abs(v) for p in feasible for v in p])
        hull = convex_hull(_dedupe(feasible, 1e-12 * scale), tol=1e-12 * scale * scale)
        if not hull:
            return [(0.0, 0.0)]
        start = hull.index(min(hull, key=lambda p: (p[0] + p[1], p[1])))
        return [(float(x) + 0.0, float(y) + 0.0) for x, y in hull[start:] + hull[:start]]

    def _inside(self, p, slack):
        return all(c.value(p) <= c.c + slack * max(1.0, abs(c.c)) for c in self.constraints)

    def contains(self, p, tol=TOL, sigmas=3.0):
        """Membership with slack ``tol`` plus ``sigmas`` standard errors per cap."""
        if p[0] < -tol or p[1] < -tol:
            return False
        return all(c.value(p) <= c.c + tol + sigmas * c.std_error
                   for c in self.constraints)

    def excludes(self, p, tol=TOL, sigmas=3.0):
        """True when some constraint is violated beyond its uncertainty band."""
        if p[0] < -tol or p[1] < -tol:
            return True
        return any(c.value(p) > c.c + tol + sigmas * c.std_error
                   for c in self.constraints)

    def contains_region(self, other, tol=TOL, sigmas=3.0):
        return all(self.contains(v, tol, sigmas) for v in other.vertices)

    def cap(self, label):
        for c in self.constraints:
            if c.label == label:
                return c.c
        raise KeyError(label)

    def swapped(self):
        """Mirror R1 <-> R2."""
        return RateRegion(tuple(replace(c, w1=c.w2, w2=c.w1) for c in self.constraints),
                          dict(self.meta))

    def same_set(self, other, tol=1e-7):
        a, b = self.vertices, other.vertices
        return len(a) == len(b) and all(
            abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for p, q in zip(a, b))

    def as_dict(self):
        return {"constraints": [c.as_dict() for c in self.constraints],
                "vertices": [list(v) for v in self.vertices],
                "meta": dict(self.meta)}

    def vertices_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r1", "r2"])
        for x, y in self.vertices:
            w.writerow([f"{x:.12g}", f"{y:.12g}"])
        return buf.getvalue()


def rectangle(r1, r2, meta=None):
    return RateRegion((Constraint(1.0, 0.0, r1, "R1"), Constraint(0.0, 1.0, r2, "R2")),
                      meta or {})


def from_vertices(points, meta=None):
    """Smallest down-closed convex region in the quadrant containing ``points``."""
    pts = [(max(float(x), 0.0), max(float(y), 0.0)) for x, y in points]
    pts += [(0.0, 0.0)] + [(x, 0.0) for x, _ in pts] + [(0.0, y) for _, y in pts]
    # axis projections can land an ulp away from a given vertex; merge them first
    scale = max([1.0] + [v for p in pts for v in p])
    hull = convex_hull(_dedupe(pts, 1e-12 * scale), tol=1e-12 * scale * scale)
    cons = []
    n = len(hull)
    for i in range(n):
        (x0, y0), (x1, y1) = hull[i], hull[(i + 1) % n]
        # outward normal of a CCW edge
        nx, ny = y1 - y0, -(x1 - x0)
        if nx < -1e-15 or ny < -1e-15 or (nx <= 0 and ny <= 0):
            continue
        nx, ny = max(nx, 0.0), max(ny, 0.0)
        s = nx + ny
        cons.append(Constraint(nx / s, ny / s, (nx * x0 + ny * y0) / s))
    return RateRegion(tuple(cons), meta or {})


def intersect(a, b):
    """Constraint union; vertices are re-enumerated from the combined set."""
    meta = dict(a.meta)
    meta.update({"intersection_of": [a.meta.get("name", ""), b.meta.get("name", "")]})
    return RateRegion(a.constraints + b.constraints, meta)


def contains(region, point, tol=TOL):
    return region.contains(point, tol)


# -- regions of the feedback configurations -------------------------------------

def _cap(term, model, params, settings):
    est = mi.evaluate(term, model, params, n=settings.n_samples, seed=settings.seed)
    return est.value, est.std_error


def _min_cap(terms, model, params, settings):
    vals = [_cap(t, model, params, settings) for t in terms]
    return min(vals, key=lambda v: v[0])


def _meta(config, regime, model, is_capacity, **extra):
    m = {"config": config, "regime": regime, "model": model, "is_capacity": is_capacity}
    m.update(extra)
    return m


def _vsi_rectangle(model, params, settings, meta):
    d1, s1 = _cap(mi.desired(1), model, params, settings)
    d2, s2 = _cap(mi.desired(2), model, params, settings)
    return RateRegion((Constraint(1.0, 0.0, d1, "R1", s1),
                       Constraint(0.0, 1.0, d2, "R2", s2)), meta)


def _si_region(model, params, settings, meta):
    rect = _vsi_rectangle(model, params, settings, meta)
    c, s = _min_cap([mi.sum_all(1), mi.sum_all(2)], model, params, settings)
    return RateRegion(rect.constraints + (Constraint(1.0, 1.0, c, "R1+R2", s),), meta)


def build_region(config, regime, model, params, force=False,
                 settings=rg.DEFAULT_SETTINGS):
    """Region of ``config`` in ``regime`` (capacity where it is characterized).

    Raises
    ------
    RegimeMismatch
        If the scenario does not classify as ``regime`` and ``force`` is
        False, or if ``regime`` is Neither (no region is characterized).
    """
    config = rg.feedback_config(config)
    model = fading_model(model)
    if regime not in (rg.VSI, rg.SI_NOT_VSI):
        raise RegimeMismatch(f"no region is characterized for regime {regime!r}")
    actual = rg.classify(config, model, params, settings)
    if actual != regime and not force:
        raise RegimeMismatch(f"scenario classifies as {actual}, not {regime}")
    matched = actual == regime
    base = config
    if base == rg.FULL_PLUS_OPPOSITE_TX:
        base = rg.FULL_TO_RELAY
    extra = {} if matched else {"forced": True, "note": "not capacity: regime forced",
                                "classified_as": actual}

    if base == rg.FULL_PLUS_CORRESPONDING_TX:
        meta = _meta(config, regime, model, False, bound="inner", **extra)
        if regime == rg.VSI:
            return region_txfb_inner(model, params, force=True, settings=settings,
                                     meta=meta)
        si = _si_region(model, params, settings, meta)
        b1, _ = _cap(mi.sum_all(1), model, params, settings)
        return from_vertices(si.vertices + [(b1, 0.0)], meta)

    if base == rg.PARTIAL_RX1_PLUS_TX1 and regime == rg.VSI:
        meta = _meta(config, regime, model, False, bound="inner", **extra)
        rect = _vsi_rectangle(model, params, settings, meta)
        b2, _ = _cap(mi.sum_all(2), model, params, settings)
        return from_vertices(rect.vertices + [(0.0, b2)], meta)

    meta = _meta(config, regime, model, matched, **extra)
    if regime == rg.VSI:
        return _vsi_rectangle(model, params, settings, meta)
    return _si_region(model, params, settings, meta)


def region_emarc(which, model, params, settings=rg.DEFAULT_SETTINGS):
    """Three-constraint regions of the relay-feedback component channels.

    EMARC1 / EMARC2 are the enhanced multiple-access relay channels towards
    Rx1 / Rx2 (feedback from both receivers); MARCF / PEMARC are their
    partial-feedback counterparts, where the relay cut only sees (Y1, Y3).
    """
    model = fading_model(model)
    if which in (EMARC1, EMARC2):
        m = 1 if which == EMARC1 else 2
        relay1, relay2, relay_sum = mi.source_to_all(1), mi.source_to_all(2), mi.JOINT_TO_ALL
    elif which in (MARCF, PEMARC):
        m = 1 if which == MARCF else 2
        relay1, relay2 = mi.source_to_rx1_relay(1), mi.source_to_rx1_relay(2)
        relay_sum = mi.JOINT_TO_RX1_RELAY
    else:
        raise ValueError(f"unknown component channel {which!r}")
    dest1 = mi.desired(1) if m == 1 else mi.cross_with_relay(1, 2)
    dest2 = mi.desired(2) if m == 2 else mi.cross_with_relay(2, 1)
    r1, s1 = _min_cap([relay1, dest1], model, params, settings)
    r2, s2 = _min_cap([relay2, dest2], model, params, settings)
    rs, ss = _min_cap([relay_sum, mi.sum_all(m)], model, params, settings)
    return RateRegion((Constraint(1.0, 0.0, r1, "R1", s1),
                       Constraint(0.0, 1.0, r2, "R2", s2),
                       Constraint(1.0, 1.0, rs, "R1+R2", ss)),
                      {"name": which, "model": model, "is_capacity": True})


def region_txfb_inner(model, params, force=False, settings=rg.DEFAULT_SETTINGS,
                      meta=None):
    """Achievable region with Rx -> relay and Rx -> corresponding-Tx feedback.

    Time sharing between A = (DesiredWithRelay(1), DesiredWithRelay(2)) and
    B = (SumAll(1), 0), where Tx2 learns user 1's message through feedback
    and cooperates with the relay.

    Raises
    ------
    ConditionNotMet
        If :func:`regimes.check_txfb` fails and ``force`` is False.
    """
    model = fading_model(model)
    report = rg.check_txfb(params, model, settings)
    if not report.overall and not force:
        failed = [e.name for e in report.entries if e.state != rg.SATISFIED]
        raise ConditionNotMet("transmitter-feedback conditions fail: " + "; ".join(failed))
    a1, s1 = _cap(mi.desired(1), model, params, settings)
    a2, s2 = _cap(mi.desired(2), model, params, settings)
    b1, sb = _cap(mi.sum_all(1), model, params, settings)
    if meta is None:
        meta = _meta(rg.FULL_PLUS_CORRESPONDING_TX, rg.VSI, model, False, bound="inner")
    if not report.overall:
        meta = dict(meta, forced=True, note="conditions not met: region not achievable")
    meta = dict(meta, point_A=[a1, a2], point_B=[b1, 0.0])
    cons = [Constraint(0.0, 1.0, a2, "R2", s2), Constraint(1.0, 0.0, b1, "R1", sb)]
    if a2 > 0.0 and b1 > a1:
        # line through (B1, 0) and (A1, A2)
        slope = (b1 - a1) / a2
        cons.append(Constraint(1.0, slope, b1, "R1+slope*R2", sb))
    return RateRegion(tuple(cons), meta)


def region_txfb_outer(model, params, settings=rg.DEFAULT_SETTINGS):
    """Outer bound: multiple-access-with-feedback cut intersected with the
    joint (Y1, Y2) receiver cut, both with independent Gaussian inputs."""
    model = fading_model(model)

    def caps(terms, labels):
        out = []
        for (w1, w2), t, lab in zip(((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)), terms, labels):
            v, s = _cap(t, model, params, settings)
            out.append(Constraint(w1, w2, v, lab, s))
        return tuple(out)

    mac = caps([mi.source_to_all(1), mi.source_to_all(2), mi.JOINT_TO_ALL],
               ["R1 (MAC-FB)", "R2 (MAC-FB)", "R1+R2 (MAC-FB)"])
    ob = caps([mi.relay_pair_at_rx_pair(1), mi.relay_pair_at_rx_pair(2),
               mi.SUM_AT_RX_PAIR],
              ["R1 (Rx pair)", "R2 (Rx pair)", "R1+R2 (Rx pair)"])
    meta = _meta(rg.FULL_PLUS_CORRESPONDING_TX, None, model, False, bound="outer")
    return RateRegion(mac + ob, meta)


# -- asymptotic sum-rate sweep ----------------------------------------------------

_FIXED_DEFAULT = {"a11": 1.0, "a13": 1.0, "a22": 1.0, "a23": 1.0, "a31": 1.0, "a32": 1.0}


def sumrate_ratio_sweep(alpha12, alpha21, a_exp, b_exp, snr_list, fixed=None,
                        model=RAYLEIGH):
    """Ratio of the sum rate with Tx feedback to that without, versus SNR.

    All powers equal SNR, the cross links scale as a12 = alpha12 SNR^((b-1)/2)
    and a21 = alpha21 SNR^((a-1)/2), and the other six attenuations are held
    at ``fixed`` (unit by default). With Tx feedback the sum rate includes
    the corner point (SumAll(1), 0); without it the VSI sum capacity is
    DesiredWithRelay(1) + DesiredWithRelay(2). The ratio tends to a/2.
    """
    if not (a_exp > 1 and b_exp > 1):
        raise ValueError("exponents must exceed 1")
    snrs = [float(s) for s in snr_list]
    if any(s <= 0 for s in snrs) or any(b <= a for a, b in zip(snrs, snrs[1:])):
        raise ValueError("snr_list must be positive and increasing")
    att = dict(_FIXED_DEFAULT)
    att.update(fixed or {})
    out = []
    for snr in snrs:
        p = NetworkParams(a12=alpha12 * snr ** ((b_exp - 1) / 2),
                          a21=alpha21 * snr ** ((a_exp - 1) / 2),
                          P1=snr, P2=snr, P3=snr, **att)
        c_tx = mi.evaluate(mi.sum_all(1), model, p).value
        c_fb = (mi.evaluate(mi.desired(1), model, p).value
                + mi.evaluate(mi.desired(2), model, p).value)
        out.append({"snr": snr, "c_fb_tx": c_tx, "c_fb": c_fb, "ratio": c_tx / c_fb})
    return out
