import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icrf.special_fn import (ADAPTIVE, EULER_GAMMA, DomainError, QuadratureSpec, e1,
                             e1_scaled, expected_log1p_exp)

DECADES = [10.0 ** k for k in range(-3, 4)]


@pytest.mark.parametrize("x", DECADES + [0.5, 0.999, 1.0, 1.001, 2.5, 700.0])
def test_e1_matches_mpmath(x):
    assert e1(x) == pytest.approx(float(mpmath.e1(x)), rel=1e-10)


@pytest.mark.parametrize("x", DECADES + [1e4, 1e5, 1e6])
def test_e1_scaled_matches_mpmath(x):
    ref = float(mpmath.exp(x) * mpmath.e1(x))
    assert e1_scaled(x) == pytest.approx(ref, rel=1e-10)


def test_reference_values():
    # quadrature oracle values
    assert e1(1.0) == pytest.approx(0.2193839344, abs=1e-9)
    assert e1(0.5) == pytest.approx(0.5597735948, abs=1e-9)
    assert e1_scaled(1.0) == pytest.approx(0.5963473623, abs=1e-9)


def test_large_argument_tail():
    assert e1(50.0) < math.exp(-50.0)
    assert e1_scaled(1e4) == pytest.approx(1e-4, rel=2e-4)
    assert math.isfinite(e1_scaled(1e6)) and e1_scaled(1e6) > 0
    assert e1_scaled(math.inf) == 0.0 and e1(math.inf) == 0.0


def test_small_argument_expansion():
    x = 1e-3
    assert e1(x) == pytest.approx(-EULER_GAMMA - math.log(x), rel=1e-3)
    # the scaled form carries an extra factor e^x ~ 1 + x
    assert e1_scaled(x) == pytest.approx((-EULER_GAMMA - math.log(x)) * math.exp(x),
                                         rel=1e-3)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_domain(x):
    with pytest.raises(DomainError):
        e1(x)
    with pytest.raises(DomainError):
        e1_scaled(x)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=1e-2)
    with pytest.raises(ValueError):
        QuadratureSpec(method="Simpson")


@pytest.mark.parametrize("x", [1e-3, 0.3, 1.0, 7.0, 300.0])
def test_adaptive_method_agrees(x):
    spec = QuadratureSpec(ADAPTIVE)
    assert e1_scaled(x, spec) == pytest.approx(e1_scaled(x), rel=1e-9)
    assert e1(x, spec) == pytest.approx(e1(x), rel=1e-9)


def test_bracketing_log_uniform_samples():
    rng = np.random.default_rng(11)
    for x in np.exp(rng.uniform(math.log(1e-3), math.log(700.0), 10_000)):
        v = e1(x)
        assert 0.5 * math.exp(-x) * math.log1p(2 / x) <= v * (1 + 1e-12)
        assert v <= math.exp(-x) * math.log1p(1 / x) * (1 + 1e-12)


@given(st.floats(min_value=1e-6, max_value=500.0))
def test_scaled_consistency(x):
    assert e1_scaled(x) * math.exp(-x) == pytest.approx(e1(x), rel=1e-10)


@settings(max_examples=200)
@given(st.lists(st.floats(min_value=1e-4, max_value=1e5), min_size=2, max_size=20,
                unique=True))
def test_strictly_decreasing(xs):
    # neighbours closer than a few ulps cannot be resolved in double precision
    xs = sorted(xs)
    xs = [b for a, b in zip([0.0] + xs, xs) if b > a * (1 + 1e-9)]
    ys = [e1(x) for x in xs if x < 700]
    zs = [e1_scaled(x) for x in xs]
    assert all(a > b for a, b in zip(ys, ys[1:]))
    assert all(a > b for a, b in zip(zs, zs[1:]))


def test_expected_log1p_exp():
    assert expected_log1p_exp(0.0) == 0.0
    assert expected_log1p_exp(1.0) / math.log(2) == pytest.approx(0.8604, abs=1e-4)
    ref = mpmath.quad(lambda t: mpmath.log(1 + 2.5 * t) * mpmath.exp(-t), [0, mpmath.inf])
    assert expected_log1p_exp(2.5) == pytest.approx(float(ref), rel=1e-10)


def test_small_argument_reference():
    assert e1(1e-3) == pytest.approx(6.3307, rel=1e-3)
    # e^x shifts the scaled value by ~0.1% at x = 1e-3, so the band is wider
    assert e1_scaled(1e-3) == pytest.approx(6.3307, rel=2e-3)
