"""Estimates of a monitored observable that use the future record as well.

A past state ``rho`` and a future effect ``E`` bracket one readout. The
readout density they imply depends on the observable only through

* the weak value ``z_w = Re tr(E O rho) / tr(E rho)``, and
* the second-order term ``z_c = tr(E O rho O) / tr(E rho)``,

and its mean is the smoothed estimate ``z_S = z_w / D`` with
``D = (1 + eps)/2 + (1 - eps) z_c / 2`` and ``eps = exp(-dt / 2 tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import Observable, QubitState, as_matrix, hermitian_eigvals
from .measurement import MeasurementModel, gaussian_component
from .trajectory import EffectSeries, TrajectoryRecord

OVERLAP_RTOL = 1e-12
DENOMINATOR_TOL = 1e-12


class AnomalousOverlap(ArithmeticError):
    """Past state and future effect are (numerically) orthogonal."""


class DegenerateDenominator(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class BidirectionalPoint:
    past_state: QubitState
    future_effect: np.ndarray

    def __post_init__(self):
        e = as_matrix(self.future_effect)
        if np.max(np.abs(e - e.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(e))):
            raise ValueError("future effect must be Hermitian")
        if hermitian_eigvals(e)[0] < -1e-12 * max(1.0, np.max(np.abs(e))):
            raise ValueError("future effect must be positive semidefinite")
        object.__setattr__(self, "future_effect", e)

    @property
    def overlap(self) -> float:
        return float(np.trace(self.future_effect @ self.past_state.matrix).real)

    def _checked_overlap(self) -> float:
        ov = self.overlap
        scale = np.linalg.norm(self.future_effect) * np.linalg.norm(self.past_state.matrix)
        if not ov >= OVERLAP_RTOL * scale:
            raise AnomalousOverlap(f"tr(E rho) = {ov!r} is below {OVERLAP_RTOL} x norms")
        return ov


def weak_value(point: BidirectionalPoint, obs: Observable) -> float:
    o = Observable.parse(obs).matrix
    ov = point._checked_overlap()
    return float(np.trace(point.future_effect @ o @ point.past_state.matrix).real / ov)


def second_order_term(point: BidirectionalPoint, obs: Observable) -> float:
    o = Observable.parse(obs).matrix
    ov = point._checked_overlap()
    val = np.trace(point.future_effect @ o @ point.past_state.matrix @ o) / ov
    # real for Hermitian E and rho; a residue means corrupted inputs
    assert abs(val.imag) < 1e-10, val
    return float(val.real)


def smoothing_denominator(z_c, model: MeasurementModel):
    eps = model.coherence_factor
    return 0.5 * (1 + eps) + 0.5 * (1 - eps) * z_c


def smoothed_estimate(z_w: float, z_c: float, model: MeasurementModel) -> float:
    den = smoothing_denominator(z_c, model)
    if not den >= DENOMINATOR_TOL:
        raise DegenerateDenominator(f"denominator {den!r} for z_c={z_c!r}")
    return z_w / den


def smoothed_pdf(r, point: BidirectionalPoint, model: MeasurementModel):
    """Readout density conditioned on the past state and the future effect.

    Direct three-Gaussian form; reduces to the causal density when the
    future effect is trivial.
    """
    obs = model.obs
    zw = weak_value(point, obs)
    zc = second_order_term(point, obs)
    eps = model.coherence_factor
    g1 = gaussian_component(r, 1.0, model)
    gm = gaussian_component(r, -1.0, model)
    g0 = gaussian_component(r, 0.0, model)
    num = (
        (g1 - gm) * zw
        + 0.5 * (g1 + gm + 2 * eps * g0)
        + 0.5 * (g1 + gm - 2 * eps * g0) * zc
    )
    return num / ((1 + eps) + (1 - eps) * zc)


def smoothed_moments(point: BidirectionalPoint, model: MeasurementModel) -> tuple[float, float, float]:
    obs = model.obs
    zw = weak_value(point, obs)
    zc = second_order_term(point, obs)
    zs = smoothed_estimate(zw, zc, model)
    v = model.variance
    m2 = v + 0.5 * (1 + zc) / smoothing_denominator(zc, model)
    return zs, m2, (1 + 3 * v) * zs


@dataclass
class EstimateSeries:
    """Per-step estimates of one observable.

    ``z`` is the causal expectation, ``z_w`` the weak value, ``z_c`` the
    second-order term and ``z_S`` the smoothed estimate. In the two-meter
    setting the same fields hold the x-analogues. ``anomalous`` flags steps
    whose past and future were near-orthogonal; their values are computed
    with a floored overlap and kept.
    """

    times: np.ndarray
    z: np.ndarray
    z_w: np.ndarray
    z_c: np.ndarray
    z_S: np.ndarray
    anomalous: np.ndarray
    obs: Observable = Observable.Z

    @property
    def anomalous_count(self) -> int:
        return int(np.count_nonzero(self.anomalous))

    def __len__(self):
        return len(self.z)


def estimate_arrays(states, effects, obs: Observable, model: MeasurementModel):
    """Vectorized ``(z, z_w, z_c, z_S, anomalous)`` over stacked 2x2 arrays."""
    states = np.asarray(states, dtype=np.complex128)
    effects = np.asarray(effects, dtype=np.complex128)
    lead = states.shape[:-2]
    return kernels.estimates(
        states.reshape(*lead, 4), effects.reshape(*lead, 4), int(obs), model.strength
    )


def smooth_series(
    record: TrajectoryRecord,
    effects: EffectSeries,
    obs: Observable | None = None,
    model: MeasurementModel | None = None,
) -> EstimateSeries:
    """Pair ``forward_states[j]`` with ``effects[j]`` for every step.

    ``model`` sets the coarseness in the smoothing denominator and defaults
    to the record's own meter.
    """
    if len(effects) != record.n_steps:
        raise ValueError("record and effects are not aligned")
    obs = record.model.obs if obs is None else Observable.parse(obs)
    model = record.model if model is None else model
    z, zw, zc, zs, flag = estimate_arrays(record.forward_states, effects.effects, obs, model)
    return EstimateSeries(record.times, z, zw, zc, zs, flag, obs)
