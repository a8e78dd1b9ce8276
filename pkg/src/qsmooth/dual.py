"""Two agents: one monitors sigma_z strongly, the other sigma_x weakly.

Each step applies the drive and then both meters, one after the other.
The default order is X then Z (``order="xz"``); ``order="zx"`` swaps it.

The omniscient observer conditions on both records. The ignorant observer
sees only the Z record and models only the Z backaction, even though the X
meter acted on the qubit; it still estimates what the X meter reported.
Both smooth with the X meter's ``dt/tau_x`` in the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import Observable, QubitState, rabi_unitary
from .measurement import DegenerateUpdate, MeasurementModel
from .metrics import relative_mse
from .smoother import EstimateSeries
from .trajectory import EffectUnderflow, draw_noise

ORDERS = ("xz", "zx")


@dataclass(frozen=True)
class DualModel:
    model_z: MeasurementModel
    model_x: MeasurementModel
    omega: float
    steps: int
    order: str = "xz"

    def __post_init__(self):
        if self.model_z.obs is not Observable.Z or self.model_x.obs is not Observable.X:
            raise ValueError("model_z must measure Z and model_x must measure X")
        if not np.isclose(self.model_z.dt, self.model_x.dt, rtol=1e-12, atol=0):
            raise ValueError("both meters must share dt")
        if not self.model_z.tau < self.model_x.tau:
            raise ValueError("tau_z must be smaller than tau_x")
        if self.steps < 1:
            raise ValueError("need at least one step")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")

    @classmethod
    def build(cls, dt, tau_z, tau_x, omega=2 * np.pi, steps=1, order="xz") -> "DualModel":
        return cls(
            MeasurementModel(dt, tau_z, Observable.Z),
            MeasurementModel(dt, tau_x, Observable.X),
            omega,
            steps,
            order,
        )

    @property
    def dt(self) -> float:
        return self.model_z.dt

    @property
    def ratio(self) -> float:
        return self.model_x.tau / self.model_z.tau

    @property
    def x_slot(self) -> int:
        return 0 if self.order == "xz" else 1

    @property
    def z_slot(self) -> int:
        return 1 - self.x_slot

    @property
    def codes(self) -> list[int]:
        c = [0, 0]
        c[self.x_slot] = int(Observable.X)
        c[self.z_slot] = int(Observable.Z)
        return c

    def strengths(self, *, ignorant: bool = False) -> list[float]:
        k = [0.0, 0.0]
        k[self.z_slot] = self.model_z.strength
        k[self.x_slot] = 0.0 if ignorant else self.model_x.strength
        return k

    def with_ratio(self, ratio: float) -> "DualModel":
        return DualModel.build(
            self.dt, self.model_z.tau, ratio * self.model_z.tau, self.omega, self.steps, self.order
        )

    @property
    def unitary(self) -> np.ndarray:
        return rabi_unitary(self.omega, self.dt)

    def to_slots(self, zx_columns: np.ndarray) -> np.ndarray:
        """Reorder trailing ``(z, x)`` columns into measurement-slot order."""
        return zx_columns if self.order == "zx" else zx_columns[..., ::-1]


@dataclass
class DualRecord:
    readouts_z: np.ndarray
    readouts_x: np.ndarray
    slot_states: np.ndarray
    initial_state: QubitState
    order: str = "xz"

    @property
    def true_forward_states(self) -> np.ndarray:
        """State after each step's unitary, before either meter."""
        return self.slot_states[:, 0]

    @property
    def n_steps(self) -> int:
        return len(self.readouts_z)


def dual_forward_pass(initial: QubitState, dual: DualModel, rng: np.random.Generator) -> DualRecord:
    uni, gau = draw_noise(rng, dual.steps, 2)
    r, states, ok = kernels.simulate(
        initial.matrix,
        dual.unitary,
        dual.codes,
        dual.strengths(),
        dual.to_slots(uni)[None],
        dual.to_slots(gau)[None],
    )
    if not ok[0]:
        raise DegenerateUpdate("state update lost normalization during dual forward pass")
    return DualRecord(
        readouts_z=r[0, :, dual.z_slot].copy(),
        readouts_x=r[0, :, dual.x_slot].copy(),
        slot_states=states[0].reshape(dual.steps, 2, 2, 2),
        initial_state=initial,
        order=dual.order,
    )


def slot_readouts(dual: DualModel, readouts_z, readouts_x=None) -> np.ndarray:
    """Pack the records as ``(..., steps, 2)`` in slot order; missing X is zero."""
    rz = np.asarray(readouts_z, dtype=float)
    out = np.zeros(rz.shape + (2,))
    out[..., dual.z_slot] = rz
    if readouts_x is not None:
        out[..., dual.x_slot] = readouts_x
    return out


def estimates_from_records(rho0, dual: DualModel, readouts, *, ignorant: bool, states=None, backend=None):
    """Batched X estimates ``(x, x_w, x_c, x_S, anomalous)``.

    ``readouts`` is ``(b, steps, 2)`` in slot order. Forward states are
    recomputed from the readouts unless given (the omniscient forward
    states are the true ones and the simulator already has them).
    """
    codes = dual.codes
    ks = dual.strengths(ignorant=ignorant)
    u = dual.unitary
    if states is None:
        states, ok = kernels.filter_states(rho0, u, codes, ks, readouts, backend=backend)
        if not ok.all():
            raise DegenerateUpdate("filter lost normalization")
    eff, _, _, _, ok = kernels.effects(u, codes, ks, readouts, backend=backend)
    if not ok.all():
        raise EffectUnderflow("future effect underflowed")
    s = dual.x_slot
    return kernels.estimates(
        states[:, :, s], eff[:, :, s], int(Observable.X), dual.model_x.strength, backend=backend
    )


def _series(dual: DualModel, est) -> EstimateSeries:
    x, xw, xc, xs, flag = (a[0] for a in est)
    times = dual.dt * np.arange(1, dual.steps + 1)
    return EstimateSeries(times, x, xw, xc, xs, flag, Observable.X)


def omniscient_estimates(record: DualRecord, dual: DualModel) -> EstimateSeries:
    """``x`` and ``x_S`` from both records and both backactions."""
    readouts = slot_readouts(dual, record.readouts_z, record.readouts_x)[None]
    states = record.slot_states.reshape(1, dual.steps, 2, 4)
    return _series(
        dual,
        estimates_from_records(record.initial_state.matrix, dual, readouts, ignorant=False, states=states),
    )


def ignorant_estimates(readouts_z, initial: QubitState, dual: DualModel) -> EstimateSeries:
    """``x^Z`` and ``x_S^Z`` from the Z record alone.

    Takes only the Z readouts, so the X record cannot leak in.
    """
    readouts = slot_readouts(dual, readouts_z)[None]
    return _series(dual, estimates_from_records(initial.matrix, dual, readouts, ignorant=True))


def dual_comparison(readouts_x, omniscient: EstimateSeries, ignorant: EstimateSeries):
    """``(Q(x^Z, x), Q(x_S^Z, x), Q(x_S, x))`` against the X record."""
    ref = omniscient.z
    return (
        float(relative_mse(readouts_x, ignorant.z, ref)),
        float(relative_mse(readouts_x, ignorant.z_S, ref)),
        float(relative_mse(readouts_x, omniscient.z_S, ref)),
    )


@dataclass(frozen=True)
class SweepRow:
    ratio: float
    frac_xZ: float
    frac_xSZ: float
    frac_xS: float
    n: int


def sweep_ratio(
    dual_base: DualModel,
    ratios,
    realizations: int,
    master_seed: int,
    initial: QubitState | None = None,
    workers: int | None = None,
) -> list[SweepRow]:
    """Positive-Q fractions of the three X estimates for each ``tau_x/tau_z``.

    Every ratio reuses the same per-realization noise streams.
    """
    from .ensemble import run_dual_ensemble

    ratios = sorted(float(v) for v in ratios)
    if any(v <= 1 for v in ratios):
        raise ValueError("ratios must exceed 1")
    if len(set(ratios)) != len(ratios):
        raise ValueError("ratios must be distinct")
    initial = QubitState.maximally_mixed() if initial is None else initial
    rows = []
    for ratio in ratios:
        res = run_dual_ensemble(initial, dual_base.with_ratio(ratio), realizations, master_seed, workers)
        f = res.fractions
        rows.append(SweepRow(ratio, f[0], f[1], f[2], realizations))
    return rows


def is_monotone(values, *, tol: float = 0.0) -> bool:
    """Non-decreasing up to ``tol``."""
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) >= -tol))
