import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icrf import mi_eval as mi
from icrf import regimes as rg
from icrf.channel_model import LINKS, PHASE, RAYLEIGH, NetworkParams
from icrf.oracle import random_scenario


def linear(bits):
    """Entries are reported in bits; the reference values are SNR-like."""
    return 2.0 ** bits - 1.0


VSI_1 = "DesiredWithRelay(1) <= InterfAsNoise(1->2)"
VSI_2 = "DesiredWithRelay(2) <= InterfAsNoise(2->1)"
SI_1 = "DesiredWithRelay(1) <= InterfConditioned(1->2)"
SI_2 = "DesiredWithRelay(2) <= InterfConditioned(2->1)"
RELAY_1 = "DesiredWithRelay(1) <= SourceToRx1AndRelay(1)"

amp = st.floats(0.0, 2.0)
pw = st.floats(0.0, 100.0)


@st.composite
def network(draw):
    return NetworkParams(**{n: draw(amp) for n in LINKS}, P1=draw(pw), P2=draw(pw),
                         P3=draw(pw))


def test_vsi_reference_entries(vsi_params):
    r = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, vsi_params)
    assert r.overall
    e1, e2 = r.entry(VSI_1), r.entry(VSI_2)
    assert linear(e1.lhs) == pytest.approx(2.44, abs=1e-9)
    assert linear(e1.rhs) == pytest.approx(2.8406, abs=1e-4)
    assert linear(e2.lhs) == pytest.approx(0.725, abs=1e-9)
    assert linear(e2.rhs) == pytest.approx(1.4244, abs=1e-4)
    assert e1.margin == pytest.approx(e1.rhs - e1.lhs)


def test_vsi_fails_for_si_params(si_params):
    r = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, si_params)
    assert not r.overall
    e2 = r.entry(VSI_2)
    assert not e2.satisfied
    assert linear(e2.rhs) == pytest.approx(1.296 / 3.44, abs=1e-4)


def test_si_reference_entries(si_params):
    r = rg.check_si(rg.FULL_TO_RELAY, PHASE, si_params)
    assert r.overall
    assert linear(r.entry(SI_1).rhs) == pytest.approx(2.809 / 1.1, abs=1e-4)
    assert linear(r.entry(SI_2).rhs) == pytest.approx(1.296 / 1.676, abs=1e-4)


def test_no_cross_links():
    p = NetworkParams(a11=0.5, a22=0.5, a31=0.2, a32=0.2, P1=10, P2=10, P3=10)
    r = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, p)
    assert all(e.rhs == 0.0 for e in r.entries) and not r.overall
    assert rg.classify(rg.FULL_TO_RELAY, PHASE, p) == rg.NEITHER


def test_partial_relay_entry(partial_params):
    e = rg.check_vsi(rg.PARTIAL_RX1, PHASE, partial_params).entry(RELAY_1)
    assert linear(e.lhs) == pytest.approx(0.5, abs=1e-9)
    assert linear(e.rhs) == pytest.approx(1.3, abs=1e-9)
    assert e.satisfied


def test_partial_si_has_relay_decoding_entries(partial_params):
    r = rg.check_si(rg.PARTIAL_RX1, PHASE, partial_params)
    names = [e.name for e in r.entries]
    assert "SumAll(2) <= JointToRx1Relay" in names
    assert len(names) == 5


def test_no_feedback_entry_counts(vsi_params):
    assert len(rg.check_vsi(rg.NO_FEEDBACK, PHASE, vsi_params).entries) == 5
    assert len(rg.check_si(rg.NO_FEEDBACK, PHASE, vsi_params).entries) == 8


def test_txfb_reference(txfb_params):
    r = rg.check_txfb(txfb_params, PHASE)
    e = r.entry(rg.TXFB_ENTRY)
    assert e.lhs == pytest.approx(1.1564, abs=1e-4)
    assert e.rhs == pytest.approx(1.5538, abs=1e-3)
    assert e.satisfied
    # the example parameters sit just outside the second interference condition
    assert not r.entry(VSI_2).satisfied
    assert linear(r.entry(VSI_2).lhs) == pytest.approx(0.5, abs=1e-9)
    assert not r.overall


def test_txfb_without_cross_link(txfb_params):
    p = NetworkParams(**{**txfb_params.attenuations(), "a12": 0.0}, P1=10, P2=10, P3=10)
    e = rg.check_txfb(p, PHASE).entry(rg.TXFB_ENTRY)
    assert e.rhs == 0.0 and not e.satisfied


def test_txfb_mirror(txfb_params):
    a = rg.check_txfb(txfb_params.swapped().swapped(), PHASE)
    b = rg.check_txfb(txfb_params, PHASE)
    assert [e.lhs for e in a.entries] == [e.lhs for e in b.entries]
    mirrored = rg.check_txfb(txfb_params.swapped(), PHASE).entry(rg.TXFB_ENTRY)
    g = txfb_params.gain
    assert mirrored.lhs == pytest.approx(math.log2(1 + g(1, 2) + g(2, 2) + g(3, 2)))
    assert mirrored.rhs == pytest.approx(math.log2(1 + g(2, 1)))


def test_classify_examples(vsi_params, si_params):
    assert rg.classify(rg.FULL_TO_RELAY, PHASE, vsi_params) == rg.VSI
    assert rg.classify(rg.FULL_TO_RELAY, PHASE, si_params) == rg.SI_NOT_VSI
    assert rg.classify("FullToRelayPlusOppositeTx", PHASE, vsi_params) == rg.VSI


def test_corresponding_tx_classification(txfb_params, vsi_params):
    cfg = rg.FULL_PLUS_CORRESPONDING_TX
    assert rg.classify(cfg, PHASE, txfb_params) in (rg.SI_NOT_VSI, rg.NEITHER)
    with pytest.raises(rg.UnsupportedConfig):
        rg.check_vsi(cfg, PHASE, vsi_params)
    with pytest.raises(rg.UnsupportedConfig):
        rg.check_si(cfg, PHASE, vsi_params)


def test_config_names():
    assert rg.feedback_config("fulltorelay") == rg.FULL_TO_RELAY
    with pytest.raises(rg.UnsupportedConfig):
        rg.feedback_config("PartialRx3ToRelay")


def test_rayleigh_uses_e1_bound(vsi_params):
    r = rg.check_vsi(rg.FULL_TO_RELAY, RAYLEIGH, vsi_params)
    e = r.entry(VSI_1)
    assert e.method == rg.E1_BOUND
    c = vsi_params.gain(1, 2) / (1 + vsi_params.gain(2, 2) + vsi_params.gain(3, 2))
    # the bound sits below the exact expectation of log2(1 + c X)
    assert e.rhs < mi.mean_log2_expsum([c])
    scaled = float(mpmath.exp(1 / c) * mpmath.e1(1 / c))
    assert e.rhs == pytest.approx(math.log2(c / scaled), rel=1e-10)


def test_entry_states():
    e = rg.ConditionEntry("x", 1.0, 1.0 - 5e-10)
    assert e.state == rg.SATISFIED
    assert rg.ConditionEntry("x", 1.0, 0.99).state == rg.VIOLATED
    mc = rg.ConditionEntry("x", 1.0, 1.01, mi.MONTE_CARLO, std_error=0.01)
    assert mc.state == rg.INDETERMINATE and mc.satisfied is None
    assert rg.ConditionEntry("x", 1.0, 1.05, mi.MONTE_CARLO, 0.01).satisfied
    report = rg.ConditionReport("c", PHASE, "VSI", (rg.ConditionEntry("a", 0, 1), mc))
    assert report.state == rg.INDETERMINATE and not report.overall


def test_report_json(vsi_params):
    rep = rg.regime_report(rg.FULL_TO_RELAY, PHASE, vsi_params)
    assert rep["regime"] == rg.VSI
    for e in rep["entries"]:
        assert {"name", "lhs", "rhs", "margin", "satisfied"} <= set(e)


# -- properties ----------------------------------------------------------------

@settings(max_examples=200)
@given(network())
def test_nesting_phase(p):
    full = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, p).overall
    if full:
        assert rg.check_si(rg.FULL_TO_RELAY, PHASE, p).overall
    if rg.check_vsi(rg.PARTIAL_RX1, PHASE, p).overall:
        assert full
    if rg.check_vsi(rg.NO_FEEDBACK, PHASE, p).overall:
        assert full


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_nesting_rayleigh(seed):
    p = random_scenario(np.random.default_rng(seed))
    full = rg.check_vsi(rg.FULL_TO_RELAY, RAYLEIGH, p).overall
    if full:
        assert rg.check_si(rg.FULL_TO_RELAY, RAYLEIGH, p).overall
    if rg.check_vsi(rg.PARTIAL_RX1, RAYLEIGH, p).overall:
        assert full


@settings(max_examples=200)
@given(network(), st.floats(1.0, 10.0), st.sampled_from([1, 2]))
def test_monotone_in_cross_link(p, factor, k):
    name = VSI_1 if k == 1 else VSI_2
    link = "a12" if k == 1 else "a21"
    before = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, p).entry(name)
    stronger = NetworkParams(**{**p.attenuations(), link: getattr(p, link) * factor},
                             P1=p.P1, P2=p.P2, P3=p.P3)
    after = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, stronger).entry(name)
    if before.satisfied:
        assert after.satisfied


@given(network())
def test_classification_consistent(p):
    reg = rg.classify(rg.FULL_TO_RELAY, PHASE, p)
    vsi = rg.check_vsi(rg.FULL_TO_RELAY, PHASE, p).overall
    si = rg.check_si(rg.FULL_TO_RELAY, PHASE, p).overall
    assert reg == (rg.VSI if vsi else rg.SI_NOT_VSI if si else rg.NEITHER)
