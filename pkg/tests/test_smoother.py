"""Smoothed readout statistics checked against Bayes' rule by quadrature."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import random_effect, random_state
from qsmooth.algebra import IDENTITY, Observable, QubitState, expectation
from qsmooth.measurement import MeasurementModel, make_kraus, predictive_moments, predictive_pdf
from qsmooth.smoother import (
    AnomalousOverlap,
    BidirectionalPoint,
    DegenerateDenominator,
    estimate_arrays,
    second_order_term,
    smoothed_estimate,
    smoothed_moments,
    smoothed_pdf,
    weak_value,
)


def bayes_pdf(r, point, model):
    """tr(E M_r rho M_r) normalized over r, straight from the Kraus operators."""
    num = lambda x: np.trace(point.future_effect @ make_kraus(x, model) @ point.past_state.matrix @ make_kraus(x, model)).real
    w = np.sqrt(model.variance)
    z = integrate.quad(num, -1 - 14 * w, 1 + 14 * w, limit=200)[0]
    return np.array([num(x) for x in np.atleast_1d(r)]) / z


def test_identity_effect_reduces_to_predictive(rng):
    r = np.linspace(-30, 30, 1000)
    for _ in range(1000):
        s = random_state(rng)
        m = MeasurementModel(1.0, float(rng.uniform(0.1, 100)), Observable(int(rng.integers(3))))
        p = BidirectionalPoint(s, IDENTITY)
        z = expectation(s, m.obs)
        np.testing.assert_allclose(smoothed_pdf(r, p, m), predictive_pdf(r, z, m), rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(smoothed_moments(p, m), predictive_moments(z, m), rtol=1e-12, atol=1e-12)


def test_reduction_example():
    p = BidirectionalPoint(QubitState.from_bloch(0, 0, 0.3), IDENTITY)
    np.testing.assert_allclose(smoothed_moments(p, MeasurementModel(1.0, 10.0)), (0.3, 11.0, 9.3), rtol=1e-12)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("tau", [0.3, 3.0])
def test_pdf_matches_bayes_rule(seed, tau):
    rng = np.random.default_rng(seed)
    m = MeasurementModel(1.0, tau, Observable(seed % 3))
    p = BidirectionalPoint(random_state(rng), random_effect(rng))
    r = np.linspace(-6, 6, 25)
    np.testing.assert_allclose(smoothed_pdf(r, p, m), bayes_pdf(r, p, m), rtol=1e-8)


@pytest.mark.parametrize("seed", range(8))
def test_moments_by_quadrature(seed):
    rng = np.random.default_rng(100 + seed)
    m = MeasurementModel(1.0, float(rng.uniform(0.2, 5)), Observable(seed % 3))
    p = BidirectionalPoint(random_state(rng), random_effect(rng))
    w = np.sqrt(m.variance)
    lo, hi = -1 - 15 * w, 1 + 15 * w
    norm = integrate.quad(lambda x: smoothed_pdf(x, p, m), lo, hi)[0]
    assert norm == pytest.approx(1.0, abs=1e-8)
    got = [integrate.quad(lambda x: x**k * smoothed_pdf(x, p, m), lo, hi)[0] for k in (1, 2, 3)]
    np.testing.assert_allclose(got, smoothed_moments(p, m), rtol=1e-7, atol=1e-7)
    m1, _, m3 = smoothed_moments(p, m)
    assert m3 / m1 == pytest.approx(1 + 3 * m.variance, rel=1e-12)


def test_pdf_nonnegative(rng):
    for _ in range(10_000):
        m = MeasurementModel(1.0, float(rng.uniform(0.05, 50)), Observable(int(rng.integers(3))))
        p = BidirectionalPoint(random_state(rng), random_effect(rng))
        w = 10 * np.sqrt(m.variance)
        assert np.all(smoothed_pdf(np.linspace(-w, w, 41), p, m) >= 0)


def test_continuum_gaussian_kl(rng):
    m = MeasurementModel(1e-3, 1.0)
    sd = np.sqrt(m.variance)
    r = np.linspace(-12 * sd, 12 * sd, 20001)
    for _ in range(50):
        p = BidirectionalPoint(random_state(rng), random_effect(rng))
        zw = weak_value(p, m.obs)
        f = smoothed_pdf(r, p, m)
        g = np.exp(-0.5 * (r - zw) ** 2 / m.variance) / np.sqrt(2 * np.pi * m.variance)
        kl = np.trapezoid(f * np.log(f / g), r)
        assert kl < 1e-4


def test_continuum_limit_approaches_weak_value(rng):
    p = BidirectionalPoint(random_state(rng), random_effect(rng))
    zw, zc = weak_value(p, Observable.Z), second_order_term(p, Observable.Z)
    gaps = [abs(smoothed_estimate(zw, zc, MeasurementModel(dt, 1.0)) - zw) for dt in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4 * max(1, abs(zw))


def test_four_thirds():
    m = MeasurementModel(np.log(4), 1.0)
    assert m.coherence_factor == pytest.approx(0.5)
    assert smoothed_estimate(1.0, 0.0, m) == pytest.approx(4 / 3, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_scale_invariance(seed, c):
    rng = np.random.default_rng(seed)
    s, e = random_state(rng), random_effect(rng)
    m = MeasurementModel(0.1, 0.7)
    a, b = BidirectionalPoint(s, e), BidirectionalPoint(s, c * e)
    for obs in Observable:
        assert weak_value(b, obs) == pytest.approx(weak_value(a, obs), rel=1e-12, abs=1e-12)
        assert second_order_term(b, obs) == pytest.approx(second_order_term(a, obs), rel=1e-12, abs=1e-12)
    za = smoothed_estimate(weak_value(a, 2), second_order_term(a, 2), m)
    zb = smoothed_estimate(weak_value(b, 2), second_order_term(b, 2), m)
    assert zb == pytest.approx(za, rel=1e-12, abs=1e-12)


def test_orthogonal_past_and_future_flagged():
    up = QubitState.from_bloch(0, 0, 1)
    down_effect = np.array([[0, 0], [0, 1]], complex)
    p = BidirectionalPoint(up, down_effect)
    with pytest.raises(AnomalousOverlap):
        weak_value(p, Observable.Z)
    z, zw, zc, zs, flag = estimate_arrays(up.matrix[None], down_effect[None], Observable.Z, MeasurementModel(0.1, 1.0))
    assert flag[0] and np.isfinite([zw[0], zc[0], zs[0]]).all()


def test_effect_validation():
    s = QubitState.maximally_mixed()
    with pytest.raises(ValueError):
        BidirectionalPoint(s, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        BidirectionalPoint(s, -IDENTITY)


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        smoothed_estimate(0.5, -1.0 - 1e9, MeasurementModel(1.0, 0.01))


def test_vectorized_estimates_match_pointwise(rng):
    m = MeasurementModel(0.05, 0.2, Observable.X)
    states = [random_state(rng) for _ in range(50)]
    effects = [random_effect(rng) for _ in range(50)]
    z, zw, zc, zs, flag = estimate_arrays(np.array([s.matrix for s in states]), np.array(effects), m.obs, m)
    for i, (s, e) in enumerate(zip(states, effects)):
        p = BidirectionalPoint(s, e)
        assert z[i] == pytest.approx(expectation(s, m.obs), abs=1e-13)
        assert zw[i] == pytest.approx(weak_value(p, m.obs), rel=1e-11, abs=1e-12)
        assert zc[i] == pytest.approx(second_order_term(p, m.obs), rel=1e-11, abs=1e-12)
        assert zs[i] == pytest.approx(smoothed_estimate(zw[i], zc[i], m), rel=1e-11, abs=1e-12)
    assert not flag.any()
