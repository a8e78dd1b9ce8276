"""Gaussian weak measurement of a Pauli observable.

A meter coupled for a time ``dt`` with collapse timescale ``tau`` reports
``r = a + noise`` where ``a = +-1`` is the eigenvalue and the noise has
variance ``tau / dt``. The Kraus operator is
``(dt / 2 pi tau)^(1/4) exp(-(r - O)^2 dt / 4 tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import IDENTITY, Observable, QubitState, expectation, hermitize

UNDERFLOW_GUARD = 1e-300


class DegenerateUpdate(ArithmeticError):
    """Readout has (numerically) zero probability for the given state."""


@dataclass(frozen=True)
class MeasurementModel:
    dt: float
    tau: float
    obs: Observable = Observable.Z

    def __post_init__(self):
        object.__setattr__(self, "obs", Observable.parse(self.obs))
        if not (self.dt > 0 and self.tau > 0):
            raise ValueError("dt and tau must be positive")
        if not np.isfinite(self.tau / self.dt):
            raise ValueError("tau/dt must be finite")

    @property
    def variance(self) -> float:
        """Readout noise variance ``tau / dt``."""
        return self.tau / self.dt

    @property
    def strength(self) -> float:
        """``dt / tau``; small means weak."""
        return self.dt / self.tau

    @property
    def coherence_factor(self) -> float:
        """``exp(-dt / 2 tau)``, the overlap of the two pointer Gaussians."""
        return float(np.exp(-0.5 * self.dt / self.tau))

    def with_obs(self, obs) -> "MeasurementModel":
        return MeasurementModel(self.dt, self.tau, obs)


def gaussian_component(r, center, model: MeasurementModel):
    """Normalized pointer density ``G_center(r)`` with variance ``tau/dt``."""
    r = np.asarray(r, dtype=float)
    k = model.strength
    out = np.sqrt(k / (2 * np.pi)) * np.exp(-0.5 * (r - center) ** 2 * k)
    return out if out.ndim else float(out)


def make_kraus(r: float, model: MeasurementModel) -> np.ndarray:
    """Kraus operator ``sqrt(G_+1(r)) P_+ + sqrt(G_-1(r)) P_-``.

    ``P_+-`` are the eigenprojectors ``(I +- O)/2`` of the measured Pauli,
    so the same expression covers X, Y and Z.
    """
    o = model.obs.matrix
    gp = np.sqrt(gaussian_component(r, 1.0, model))
    gm = np.sqrt(gaussian_component(r, -1.0, model))
    return 0.5 * (gp + gm) * IDENTITY + 0.5 * (gp - gm) * o


def povm_element(r: float, model: MeasurementModel) -> np.ndarray:
    m = make_kraus(r, model)
    return m.conj().T @ m


def predictive_pdf(r, z, model: MeasurementModel):
    """Readout density given the expectation ``z`` of the measured Pauli."""
    return 0.5 * (1 + z) * gaussian_component(r, 1.0, model) + 0.5 * (
        1 - z
    ) * gaussian_component(r, -1.0, model)


def predictive_moments(z: float, model: MeasurementModel) -> tuple[float, float, float]:
    v = model.variance
    return z, 1.0 + v, (1.0 + 3.0 * v) * z


def sample_readout(state: QubitState, model: MeasurementModel, rng: np.random.Generator) -> float:
    """Draw one readout: eigenvalue first, then additive pointer noise."""
    z = expectation(state, model.obs)
    a = 1.0 if rng.random() < 0.5 * (1 + z) else -1.0
    return a + np.sqrt(model.variance) * rng.standard_normal()


def sample_readouts(
    state: QubitState, model: MeasurementModel, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Many independent readouts from the same pre-measurement state."""
    z = expectation(state, model.obs)
    a = np.where(rng.random(size) < 0.5 * (1 + z), 1.0, -1.0)
    return a + np.sqrt(model.variance) * rng.standard_normal(size)


def update_state(state: QubitState, r: float, model: MeasurementModel) -> QubitState:
    """Condition ``state`` on readout ``r``: ``M rho M^dagger / tr(...)``."""
    m = make_kraus(r, model)
    out = m @ state.matrix @ m.conj().T
    norm = (out[0, 0] + out[1, 1]).real
    if not norm > UNDERFLOW_GUARD:
        raise DegenerateUpdate(f"readout r={r!r} has probability {norm!r} for {state!r}")
    return QubitState(hermitize(out / norm))
