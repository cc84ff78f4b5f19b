import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from icrf.channel_model import (DEFAULT_LAYOUT, LINKS, PHASE, RAYLEIGH, ChannelDraw,
                                DegenerateGeometry, Layout, NetworkParams, ScenarioError,
                                apply_channel, attenuation_from_geometry, fading_model,
                                params_from_dict, sample_channel, sample_channels,
                                unit_fading)

coord = st.floats(min_value=-5, max_value=5, allow_nan=False)


def test_distance_to_attenuation():
    lay = Layout(tx1=(0, 0), tx2=(0, -1), rx1=(2.3570, 0), rx2=(1, 0))
    p = attenuation_from_geometry(lay, (0, 3))
    assert p.a11 == pytest.approx(0.18, abs=1e-4)
    assert p.a12 == pytest.approx(1.0)


def test_default_layout_attenuations():
    p = attenuation_from_geometry(DEFAULT_LAYOUT, (1.0, 0.0), (10, 10, 3))
    assert p.a11 == pytest.approx(0.18, abs=5e-4)
    assert p.a22 == pytest.approx(0.18, abs=5e-4)
    assert p.a12 == pytest.approx(0.25, abs=5e-4)
    assert p.a21 == pytest.approx(0.25, abs=5e-4)
    # direct distance check of one link
    d = math.dist(DEFAULT_LAYOUT.tx1, (1.0, 0.0))
    assert p.a13 == pytest.approx(d ** -2)
    assert p.powers == (10.0, 10.0, 3.0)


def test_exponent_knob():
    lay = Layout(amplitude_exponent=1.0)
    p = attenuation_from_geometry(lay, (1.0, 0.0))
    assert p.a13 == pytest.approx(1 / math.dist(lay.tx1, (1.0, 0.0)))


@pytest.mark.parametrize("pos", [(0, 1), (0, -1), (1.9044, -0.389), (1.9044, 0.389)])
def test_coincident_relay(pos):
    with pytest.raises(DegenerateGeometry):
        attenuation_from_geometry(DEFAULT_LAYOUT, pos)


def test_coincident_layout_nodes():
    with pytest.raises(DegenerateGeometry):
        Layout(tx1=(0, 0), tx2=(0, 0))


@given(coord, coord)
def test_mirror_symmetry(x, y):
    # the default layout is mirror-symmetric about y = 0
    try:
        p = attenuation_from_geometry(DEFAULT_LAYOUT, (x, y), (1, 2, 3))
        q = attenuation_from_geometry(DEFAULT_LAYOUT.mirrored(), (x, -y), (2, 1, 3))
    except DegenerateGeometry:
        return
    s = q.swapped()
    for name in LINKS:
        assert getattr(p, name) == pytest.approx(getattr(s, name), rel=1e-9)
    assert s.powers == p.powers


def test_params_validation():
    with pytest.raises(ScenarioError):
        NetworkParams(a11=-1)
    with pytest.raises(ScenarioError):
        NetworkParams(P1=float("inf"))
    with pytest.raises(KeyError):
        NetworkParams().a(3, 3)
    with pytest.raises(ValueError):
        fading_model("nakagami")


def test_phase_magnitude_exact():
    p = NetworkParams(**{n: 0.5 for n in LINKS})
    h = sample_channels(PHASE, p, 7, 1000)
    assert np.all(np.abs(np.abs(h) - 0.5) < 1e-15)
    d = sample_channel(PHASE, p, 7, 3)
    assert abs(abs(d.h13) - 0.5) < 1e-15


@given(st.integers(0, 2 ** 63), st.integers(0, 10 ** 6))
def test_phase_magnitudes_property(seed, index):
    p = NetworkParams(a11=0.3, a12=1.7, a13=0.01, a21=2, a22=0.5, a23=1, a31=0.2, a32=0.9)
    d = sample_channel(PHASE, p, seed, index)
    for name in LINKS:
        l, k = int(name[1]), int(name[2])
        assert abs(d.h(l, k)) == pytest.approx(p.a(l, k), rel=1e-14)


def test_rayleigh_second_moment():
    n = 10 ** 6
    x = np.abs(unit_fading(RAYLEIGH, 3, n)) ** 2
    se = x.std(axis=0, ddof=1) / math.sqrt(n)
    assert np.all(np.abs(x.mean(axis=0) - 1) <= 3 * se)
    assert np.all(np.abs(x.mean(axis=0) - 1) <= 0.01)


def test_rayleigh_scaled_moment():
    p = NetworkParams(**{n: 0.1 * (i + 1) for i, n in enumerate(LINKS)})
    n = 10 ** 5
    x = np.abs(sample_channels(RAYLEIGH, p, 11, n)) ** 2
    target = np.array([getattr(p, name) ** 2 for name in LINKS])
    se = x.std(axis=0, ddof=1) / math.sqrt(n)
    assert np.all(np.abs(x.mean(axis=0) - target) <= 3 * se)


def test_determinism_and_random_access():
    p = NetworkParams(**{n: 1.0 for n in LINKS})
    for model in (PHASE, RAYLEIGH):
        assert sample_channel(model, p, 42, 17) == sample_channel(model, p, 42, 17)
        block = sample_channels(model, p, 42, 50)
        # a draw is addressed by index, independent of how it was batched
        np.testing.assert_array_equal(block[17], sample_channel(model, p, 42, 17).as_array())
        np.testing.assert_array_equal(block[20:], sample_channels(model, p, 42, 30, start=20))
        assert sample_channel(model, p, 43, 17) != sample_channel(model, p, 42, 17)


def test_apply_channel_examples():
    ones = ChannelDraw(*([1 + 0j] * 8))
    assert apply_channel(ones, 0, 0, 0) == (0, 0, 0)
    assert apply_channel(ones, 1, 0, 0) == (1, 1, 1)
    y = apply_channel(ones, 0, 0, 1)
    assert y[2] == 0 and y[0] == 1 and y[1] == 1


cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@given(st.lists(cplx, min_size=8, max_size=8), st.lists(cplx, min_size=6, max_size=6),
       cplx)
def test_apply_channel_linear(h, xs, c):
    d = ChannelDraw(*h)
    a, b = xs[:3], xs[3:]
    ya = apply_channel(d, *a)
    yb = apply_channel(d, *b)
    yab = apply_channel(d, *(u + c * v for u, v in zip(a, b)))
    for s, u, v in zip(yab, ya, yb):
        assert s == pytest.approx(u + c * v, abs=1e-9)


def test_scenario_parsing():
    p, m = params_from_dict({"powers": [10, 10, 10], "attenuations": {"a11": 0.42},
                             "model": "rayleigh"})
    assert m == RAYLEIGH and p.a11 == 0.42 and p.a12 == 0.0
    p, m = params_from_dict({"powers": [10, 10, 3], "layout": {}, "relay": [1, 0]})
    assert m == PHASE and p.a11 == pytest.approx(0.18, abs=5e-4)
    p2, _ = params_from_dict({"powers": [10, 10, 3], "layout": {}}, relay=(1, 0))
    assert p2 == p
    bad = [[], {"attenuations": {}}, {"powers": [1, 2], "attenuations": {}},
           {"powers": [1, 1, 1], "attenuations": {"a33": 1}},
           {"powers": [1, 1, 1]}, {"powers": [1, 1, 1], "layout": {}},
           {"powers": [1, 1, 1], "attenuations": {}, "model": "x"}]
    for d in bad:
        with pytest.raises(ValueError):
            params_from_dict(d)
