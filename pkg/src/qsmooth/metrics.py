"""Figures of merit deciding which estimate a realized record follows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .smoother import EstimateSeries
from .trajectory import EffectSeries, TrajectoryRecord


class LengthMismatch(ValueError):
    pass


class DegenerateFit(ArithmeticError):
    pass


@dataclass(frozen=True)
class ComparisonResult:
    """Smoothed (``alt``) against causal (``ref``) estimate for one record."""

    q: float
    ln_r: float
    mse_ref: float
    mse_alt: float
    n_steps: int
    anomalous_count: int

    @property
    def scaled_ln_r(self) -> float:
        """``(2 dt / T) ln R``, comparable with ``q`` in the continuum limit."""
        return 2.0 * self.ln_r / self.n_steps


def _vectors(*seqs):
    arrs = [np.asarray(s, dtype=float) for s in seqs]
    n = arrs[0].shape[-1]
    if n < 1 or any(a.shape[-1] != n for a in arrs):
        raise LengthMismatch(f"lengths {[a.shape[-1] for a in arrs]}")
    return arrs


def mse(a, b):
    """Mean squared difference along the last axis."""
    a, b = _vectors(a, b)
    return np.mean((a - b) ** 2, axis=-1)


def relative_mse(readout, alt, ref):
    """``(MSE(r, ref) - MSE(r, alt)) / MSE(r, alt)``; positive when ``alt`` fits better."""
    readout, alt, ref = _vectors(readout, alt, ref)
    m_alt = mse(readout, alt)
    if np.any(m_alt == 0):
        raise DegenerateFit("alternative reproduces the readout exactly")
    return (mse(readout, ref) - m_alt) / m_alt


def log_likelihood_terms(readouts, series: EstimateSeries, model):
    """Per-step ``(ln P(r|rho_past), ln P(r|rho_past, E_future), nonpositive)``."""
    return kernels.log_likelihoods(readouts, series.z, series.z_w, series.z_c, model.strength)


def log_hypothesis_ratio(
    record: TrajectoryRecord, effects: EffectSeries, series: EstimateSeries
) -> float:
    """``ln R``: summed log-density advantage of the smoothed description.

    Equal priors for the two hypotheses, so they drop out.
    """
    if not (record.n_steps == len(effects) == len(series)):
        raise LengthMismatch("record, effects and series must be aligned")
    lp, ls, _ = log_likelihood_terms(record.readouts, series, record.model)
    return float(np.sum(ls - lp))


def compare(record: TrajectoryRecord, effects: EffectSeries, series: EstimateSeries) -> ComparisonResult:
    if not (record.n_steps == len(effects) == len(series)):
        raise LengthMismatch("record, effects and series must be aligned")
    r = record.readouts
    lp, ls, bad = log_likelihood_terms(r, series, record.model)
    m_ref = float(mse(r, series.z))
    m_alt = float(mse(r, series.z_S))
    if m_alt == 0:
        raise DegenerateFit("smoothed estimate reproduces the readout exactly")
    return ComparisonResult(
        q=(m_ref - m_alt) / m_alt,
        ln_r=float(np.sum(ls - lp)),
        mse_ref=m_ref,
        mse_alt=m_alt,
        n_steps=record.n_steps,
        anomalous_count=int(np.count_nonzero(series.anomalous | bad)),
    )
