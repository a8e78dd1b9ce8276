"""Causal generation of a monitored trajectory and backward accumulation of
future effects.

Each step applies the drive unitary and then the measurement. The state
stored for step ``j`` is the one just before measurement ``j`` (after that
step's unitary); the effect stored for step ``j`` summarizes every readout
strictly after ``j``. Pairing the two at the same index therefore brackets
readout ``r_j`` from both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra import IDENTITY, QubitState, rabi_unitary
from .measurement import DegenerateUpdate, MeasurementModel


class EffectUnderflow(ArithmeticError):
    """A future effect lost all its weight before it could be rescaled."""


@dataclass
class TrajectoryRecord:
    readouts: np.ndarray
    forward_states: np.ndarray
    model: MeasurementModel
    initial_state: QubitState
    omega: float

    @property
    def n_steps(self) -> int:
        return len(self.readouts)

    @property
    def times(self) -> np.ndarray:
        return self.model.dt * np.arange(1, self.n_steps + 1)

    @property
    def unitary(self) -> np.ndarray:
        return rabi_unitary(self.omega, self.model.dt)

    def state(self, j: int) -> QubitState:
        return QubitState(self.forward_states[j])


@dataclass
class EffectSeries:
    """Future effects, each rescaled to unit top eigenvalue.

    The unnormalized effect at ``j`` is ``exp(log_norms[j]) * effects[j]``.
    ``prior`` and ``prior_log`` describe the effect of the whole record on
    the initial state, so ``exp(prior_log) tr(prior rho0)`` is the joint
    density of all readouts.
    """

    effects: np.ndarray
    log_norms: np.ndarray
    prior: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    prior_log: float = 0.0

    def __len__(self):
        return len(self.effects)

    def joint_log_likelihood(self, initial: QubitState) -> float:
        return self.prior_log + np.log(np.trace(self.prior @ initial.matrix).real)


def draw_noise(rng: np.random.Generator, steps: int, slots: int = 1):
    """Uniform and normal draws for ``steps`` steps of ``slots`` meters.

    The draw order is fixed so that a trajectory is fully determined by its
    generator, whether it is simulated alone or inside an ensemble.
    """
    uni = rng.random((steps, slots))
    gau = rng.standard_normal((steps, slots))
    return uni, gau


def forward_pass(
    initial: QubitState,
    omega: float,
    model: MeasurementModel,
    steps: int,
    rng: np.random.Generator,
) -> TrajectoryRecord:
    """Simulate ``steps`` rounds of drive-then-measure and keep everything."""
    if steps < 1:
        raise ValueError("need at least one step")
    uni, gau = draw_noise(rng, steps)
    u = rabi_unitary(omega, model.dt)
    r, states, ok = kernels.simulate(
        initial.matrix, u, [int(model.obs)], [model.strength], uni[None], gau[None]
    )
    if not ok[0]:
        raise DegenerateUpdate("state update lost normalization during forward pass")
    return TrajectoryRecord(
        readouts=r[0, :, 0].copy(),
        forward_states=states[0, :, 0].reshape(steps, 2, 2),
        model=model,
        initial_state=initial,
        omega=omega,
    )


def refilter(record: TrajectoryRecord) -> np.ndarray:
    """Recompute the pre-measurement states from the readouts alone."""
    u = rabi_unitary(record.omega, record.model.dt)
    states, ok = kernels.filter_states(
        record.initial_state.matrix,
        u,
        [int(record.model.obs)],
        [record.model.strength],
        record.readouts[None, :, None],
    )
    if not ok[0]:
        raise DegenerateUpdate("state update lost normalization while refiltering")
    return states[0, :, 0].reshape(-1, 2, 2)


def backward_pass(record: TrajectoryRecord) -> EffectSeries:
    u = rabi_unitary(record.omega, record.model.dt)
    eff, lognorm, prior, prior_log, ok = kernels.effects(
        u, [int(record.model.obs)], [record.model.strength], record.readouts[None, :, None]
    )
    if not ok[0]:
        raise EffectUnderflow("future effect underflowed during backward pass")
    n = record.n_steps
    return EffectSeries(
        effects=eff[0, :, 0].reshape(n, 2, 2),
        log_norms=lognorm[0, :, 0].copy(),
        prior=prior[0].reshape(2, 2),
        prior_log=float(prior_log[0]),
    )
