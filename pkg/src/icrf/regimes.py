"""
Regime-condition checks (very strong / strong interference) and scenario
classification for each feedback configuration.

Every inequality is reported in bits as ``lhs <= rhs``. Phase-fading entries
are exact; Rayleigh interference-decoding entries use the exponential-integral
lower bounds on the treated-as-noise rates, and the remaining Rayleigh entries
use true expectations (closed form, quadrature or Monte Carlo). Monte Carlo
entries are three-valued: a margin within three standard errors of zero is
reported as indeterminate rather than forced to a boolean.
"""

from dataclasses import dataclass, field
import math

from . import mi_eval as mi
from .channel_model import PHASE, RAYLEIGH, fading_model
from .special_fn import e1_scaled

VSI = "VSI"
SI_NOT_VSI = "SI_not_VSI"
NEITHER = "Neither"
REGIMES = (VSI, SI_NOT_VSI, NEITHER)

NO_FEEDBACK = "NoFeedback"
FULL_TO_RELAY = "FullToRelay"
PARTIAL_RX1 = "PartialRx1ToRelay"
FULL_PLUS_OPPOSITE_TX = "FullToRelayPlusOppositeTx"
FULL_PLUS_CORRESPONDING_TX = "FullToRelayPlusCorrespondingTx"
PARTIAL_RX1_PLUS_TX1 = "PartialRx1ToRelayPlusTx1"
FEEDBACK_CONFIGS = (NO_FEEDBACK, FULL_TO_RELAY, PARTIAL_RX1, FULL_PLUS_OPPOSITE_TX,
                    FULL_PLUS_CORRESPONDING_TX, PARTIAL_RX1_PLUS_TX1)

SATISFIED = "Satisfied"
VIOLATED = "Violated"
INDETERMINATE = "Indeterminate"

DEFAULT_TOL = 1e-9
E1_BOUND = "E1Bound"


class UnsupportedConfig(ValueError):
    """The operation does not apply to the requested feedback configuration."""


def feedback_config(name):
    for c in FEEDBACK_CONFIGS:
        if str(name).lower() == c.lower():
            return c
    raise UnsupportedConfig(f"unknown feedback configuration {name!r}")


@dataclass(frozen=True)
class EvalSettings:
    """Numerical settings shared by the condition checks."""

    n_samples: int = mi.DEFAULT_MC_SAMPLES
    seed: int = 0
    tol: float = DEFAULT_TOL
    sigmas: float = 3.0


DEFAULT_SETTINGS = EvalSettings()


@dataclass(frozen=True)
class ConditionEntry:
    name: str
    lhs: float
    rhs: float
    method: str = mi.CLOSED_FORM
    std_error: float = 0.0
    tol: float = DEFAULT_TOL
    sigmas: float = 3.0

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def state(self):
        m = self.margin
        if self.std_error > 0.0:
            band = self.sigmas * self.std_error
            if m > band:
                return SATISFIED
            if m < -band:
                return VIOLATED
            return INDETERMINATE
        return SATISFIED if m >= -self.tol else VIOLATED

    @property
    def satisfied(self):
        """True, False, or None when a Monte Carlo entry is indeterminate."""
        s = self.state
        return None if s == INDETERMINATE else s == SATISFIED

    def as_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "satisfied": self.satisfied,
                "state": self.state, "method": self.method,
                "std_error": self.std_error}


@dataclass(frozen=True)
class ConditionReport:
    config: str
    model: str
    kind: str
    entries: tuple = field(default_factory=tuple)

    @property
    def state(self):
        states = [e.state for e in self.entries]
        if VIOLATED in states:
            return VIOLATED
        if INDETERMINATE in states:
            return INDETERMINATE
        return SATISFIED

    @property
    def overall(self):
        return self.state == SATISFIED

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def as_dict(self):
        return {"config": self.config, "model": self.model, "kind": self.kind,
                "overall": self.overall, "state": self.state,
                "entries": [e.as_dict() for e in self.entries]}


# -- entry builders -----------------------------------------------------------

def _value(term, model, params, settings):
    """(value, std_error, method) of a term or raw subset spec."""
    if isinstance(term, mi.MITerm):
        est = mi.evaluate(term, model, params, n=settings.n_samples, seed=settings.seed)
    else:
        est = mi.subset_mi(model, params, *term, n=settings.n_samples,
                           seed=settings.seed)
    return est.value, est.std_error, est.method


def _entry(name, lhs_term, rhs_term, model, params, settings):
    lv, ls, lm = _value(lhs_term, model, params, settings)
    rv, rs, rm = _value(rhs_term, model, params, settings)
    method = mi.MONTE_CARLO if mi.MONTE_CARLO in (lm, rm) else (
        mi.QUADRATURE if mi.QUADRATURE in (lm, rm) else mi.CLOSED_FORM)
    # independent streams are not assumed; the conservative bound adds errors
    return ConditionEntry(name, lv, rv, method, ls + rs, settings.tol, settings.sigmas)


def _e1_rate_bound(c):
    """log2(c / (e^{1/c} E1(1/c))): lower bound on E log2(1 + c |U|^2 / ...)."""
    if c <= 0.0:
        return 0.0
    return math.log2(c / e1_scaled(1.0 / c))


def _interference_entry(k, conditioned, model, params, settings):
    """Rx_o decodes user k's message: DesiredWithRelay(k) <= interference rate.

    ``conditioned`` selects the strong-interference form (own signal removed)
    over the very-strong form (own signal treated as noise).
    """
    o = 3 - k
    if conditioned:
        rhs_term = mi.interf_conditioned(k, o)
    else:
        rhs_term = mi.interf_as_noise(k, o)
    name = f"{mi.desired(k).name} <= {rhs_term.name}"
    if model == PHASE:
        return _entry(name, mi.desired(k), rhs_term, model, params, settings)
    lhs = math.log2(1.0 + params.gain(k, k) + params.gain(3, k))
    noise = 1.0 + params.gain(3, o) + (0.0 if conditioned else params.gain(o, o))
    rhs = _e1_rate_bound(params.gain(k, o) / noise)
    return ConditionEntry(name, lhs, rhs, E1_BOUND, 0.0, settings.tol, settings.sigmas)


# raw (interest, conditioned, outputs) specs for the relay-decoding sets
_TX1_AT_RELAY = ((1,), (2, 3), (3,))
_TX2_AT_RELAY = ((2,), (1, 3), (3,))
_BOTH_AT_RELAY = ((1, 2), (3,), (3,))
_DESIRED_PAIR = "DesiredWithRelay(1) + DesiredWithRelay(2)"


def _relay_entries_vsi(model, params, settings):
    """Relay decodes both messages at the destination rates (no feedback)."""
    out = [
        _entry("DesiredWithRelay(1) <= I(X1;Y3|X2,X3)", mi.desired(1), _TX1_AT_RELAY,
               model, params, settings),
        _entry("DesiredWithRelay(2) <= I(X2;Y3|X1,X3)", mi.desired(2), _TX2_AT_RELAY,
               model, params, settings),
    ]
    d1, s1, m1 = _value(mi.desired(1), model, params, settings)
    d2, s2, m2 = _value(mi.desired(2), model, params, settings)
    rv, rs, rm = _value(_BOTH_AT_RELAY, model, params, settings)
    method = mi.QUADRATURE if mi.QUADRATURE in (m1, m2, rm) else mi.CLOSED_FORM
    out.append(ConditionEntry(f"{_DESIRED_PAIR} <= I(X1,X2;Y3|X3)", d1 + d2, rv,
                              method, s1 + s2 + rs, settings.tol, settings.sigmas))
    return out


def _relay_entries_si(model, params, settings):
    out = []
    for k in (1, 2):
        own = mi.desired(k) if k == 1 else mi.cross_with_relay(1, 2)
        out.append(_entry(f"I(X1,X3;Y{k}|X2) <= I(X1;Y3|X2,X3)", own, _TX1_AT_RELAY,
                          model, params, settings))
        own = mi.desired(k) if k == 2 else mi.cross_with_relay(2, 1)
        out.append(_entry(f"I(X2,X3;Y{k}|X1) <= I(X2;Y3|X1,X3)", own, _TX2_AT_RELAY,
                          model, params, settings))
        out.append(_entry(f"SumAll({k}) <= I(X1,X2;Y3|X3)", mi.sum_all(k),
                          _BOTH_AT_RELAY, model, params, settings))
    return out


def _base_config(config):
    config = feedback_config(config)
    if config == FULL_PLUS_OPPOSITE_TX:
        # feedback to the opposite transmitter adds nothing in these regimes
        return FULL_TO_RELAY
    return config


def _vsi_entries(config, model, params, settings):
    entries = [_interference_entry(1, False, model, params, settings),
               _interference_entry(2, False, model, params, settings)]
    if config in (PARTIAL_RX1, PARTIAL_RX1_PLUS_TX1):
        entries.append(_entry("DesiredWithRelay(1) <= SourceToRx1AndRelay(1)",
                              mi.desired(1), mi.source_to_rx1_relay(1),
                              model, params, settings))
    if config == PARTIAL_RX1_PLUS_TX1:
        entries += _tx1_feedback_entries(model, params, settings)
    if config == NO_FEEDBACK:
        entries += _relay_entries_vsi(model, params, settings)
    return entries


def _tx1_feedback_entries(model, params, settings):
    """Rx1 -> Tx1 feedback on top of partial relay feedback."""
    return [
        _entry("DesiredWithRelay(1) <= InterfAsNoise(1->2)", mi.desired(1),
               mi.interf_as_noise(1, 2), model, params, settings),
        _entry("SumAll(2) <= InterfAsNoise(2->1)", mi.sum_all(2),
               mi.interf_as_noise(2, 1), model, params, settings),
    ]


def _si_entries(config, model, params, settings):
    entries = [_interference_entry(1, True, model, params, settings),
               _interference_entry(2, True, model, params, settings)]
    if config in (PARTIAL_RX1, PARTIAL_RX1_PLUS_TX1):
        entries = [
            _entry("CrossWithRelay(1->2) <= SourceToRx1AndRelay(1)",
                   mi.cross_with_relay(1, 2), mi.source_to_rx1_relay(1),
                   model, params, settings),
            _entry("CrossWithRelay(2->1) <= SourceToRx1AndRelay(2)",
                   mi.cross_with_relay(2, 1), mi.source_to_rx1_relay(2),
                   model, params, settings),
            _entry("SumAll(2) <= JointToRx1Relay", mi.sum_all(2),
                   mi.JOINT_TO_RX1_RELAY, model, params, settings),
        ] + entries
    if config == NO_FEEDBACK:
        entries += _relay_entries_si(model, params, settings)
    return entries


def check_vsi(config, model, params, settings=DEFAULT_SETTINGS):
    """Very-strong-interference conditions for a relay-feedback configuration.

    Supported: NoFeedback, FullToRelay (and FullToRelayPlusOppositeTx, which
    shares its conditions), PartialRx1ToRelay and PartialRx1ToRelayPlusTx1.
    The Rx2 partial variants are obtained by passing ``params.swapped()``.

    Raises
    ------
    UnsupportedConfig
        For FullToRelayPlusCorrespondingTx; use :func:`check_txfb`.
    """
    config = _base_config(config)
    if config == FULL_PLUS_CORRESPONDING_TX:
        raise UnsupportedConfig("transmitter feedback uses check_txfb")
    model = fading_model(model)
    return ConditionReport(config, model, VSI,
                           tuple(_vsi_entries(config, model, params, settings)))


def check_si(config, model, params, settings=DEFAULT_SETTINGS):
    """Strong-interference conditions; same configuration rules as check_vsi."""
    config = _base_config(config)
    if config == FULL_PLUS_CORRESPONDING_TX:
        raise UnsupportedConfig("transmitter feedback uses check_txfb")
    model = fading_model(model)
    return ConditionReport(config, model, "SI",
                           tuple(_si_entries(config, model, params, settings)))


TXFB_ENTRY = "SumAll(1) <= SourceAtOppConditionedAll(1)"


def check_txfb(params, model, settings=DEFAULT_SETTINGS):
    """Conditions for the enlarged region with Rx -> corresponding-Tx feedback.

    The first entry asks that Tx2, helped by its own receiver's feedback,
    decode user 1 at the full single-user rate SumAll(1); the remaining
    entries are the very-strong-interference conditions. The mirrored
    Rx2 -> Tx2 point is checked with ``params.swapped()``.
    """
    model = fading_model(model)
    entries = [_entry(TXFB_ENTRY, mi.sum_all(1), mi.source_at_opp_all(1),
                      model, params, settings)]
    entries += _vsi_entries(FULL_TO_RELAY, model, params, settings)
    return ConditionReport(FULL_PLUS_CORRESPONDING_TX, model, "TXFB", tuple(entries))


def classify(config, model, params, settings=DEFAULT_SETTINGS):
    """Strongest regime whose conditions hold: VSI, SI_not_VSI or Neither.

    Indeterminate Monte Carlo outcomes count as not established.
    """
    config = _base_config(config)
    model = fading_model(model)
    if config == FULL_PLUS_CORRESPONDING_TX:
        tx = check_txfb(params, model, settings)
        if tx.overall:
            return VSI
        si = check_si(FULL_TO_RELAY, model, params, settings)
        if si.overall and tx.entries[0].satisfied:
            return SI_NOT_VSI
        return NEITHER
    if check_vsi(config, model, params, settings).overall:
        return VSI
    if check_si(config, model, params, settings).overall:
        return SI_NOT_VSI
    return NEITHER


def regime_report(config, model, params, settings=DEFAULT_SETTINGS):
    """JSON-ready report: regime plus every evaluated entry."""
    config = feedback_config(config)
    model = fading_model(model)
    if config == FULL_PLUS_CORRESPONDING_TX:
        reports = [check_txfb(params, model, settings),
                   check_si(FULL_TO_RELAY, model, params, settings)]
    else:
        reports = [check_vsi(config, model, params, settings),
                   check_si(config, model, params, settings)]
    entries = []
    for r in reports:
        for e in r.entries:
            d = e.as_dict()
            d["kind"] = r.kind
            entries.append(d)
    return {"config": config, "model": model,
            "regime": classify(config, model, params, settings),
            "checks": {r.kind: r.state for r in reports},
            "entries": entries}
