"""Monte Carlo ensembles.

Realization ``i`` draws its noise from a Philox stream keyed by
``(master_seed, i)``, so its result does not depend on chunking or on how
many worker threads run. Chunks are gathered back in index order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import QubitState, rabi_unitary
from .dual import DualModel, estimates_from_records
from .measurement import DegenerateUpdate, MeasurementModel
from .trajectory import EffectUnderflow, draw_noise

CHUNK_ELEMENTS = 400_000


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


def ensemble_noise(master_seed: int, start: int, count: int, steps: int, slots: int):
    uni = np.empty((count, steps, slots))
    gau = np.empty((count, steps, slots))
    for b in range(count):
        uni[b], gau[b] = draw_noise(trajectory_rng(master_seed, start + b), steps, slots)
    return uni, gau


def default_workers() -> int:
    return max(1, int(os.environ.get("QSMOOTH_WORKERS", "1")))


def chunk_size(steps: int, slots: int) -> int:
    return int(max(1, min(256, CHUNK_ELEMENTS // (steps * slots))))


def map_chunks(fn, total: int, chunk: int, workers: int | None = None) -> list:
    """Apply ``fn(start, count)`` over ``[0, total)`` and return results in order."""
    workers = default_workers() if workers is None else max(1, int(workers))
    spans = [(s, min(chunk, total - s)) for s in range(0, total, chunk)]
    if workers == 1:
        return [fn(*sp) for sp in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda sp: fn(*sp), spans))


@dataclass
class EnsembleResult:
    q: np.ndarray
    ln_r: np.ndarray
    mse_ref: np.ndarray
    mse_alt: np.ndarray
    anomalous: np.ndarray
    n_steps: int

    @property
    def scaled_ln_r(self) -> np.ndarray:
        return 2.0 * self.ln_r / self.n_steps

    @property
    def size(self) -> int:
        return len(self.q)

    def summary(self) -> dict:
        q, s = self.q, self.scaled_ln_r
        return {
            "size": self.size,
            "n_steps": self.n_steps,
            "frac_Q_pos": float(np.mean(q > 0)),
            "frac_lnR_pos": float(np.mean(self.ln_r > 0)),
            "mean_Q": float(np.mean(q)),
            "mean_scaled_lnR": float(np.mean(s)),
            "median_rel_diff": float(np.median(np.abs(s - q) / np.abs(q))),
            "pearson": float(np.corrcoef(q, s)[0, 1]) if self.size > 1 else float("nan"),
            "mean_mse_smoothed": float(np.mean(self.mse_alt)),
            "mean_mse_causal": float(np.mean(self.mse_ref)),
            "anomalous_total": int(np.sum(self.anomalous)),
        }


def _single_chunk(initial, omega, model, steps, seed, backend):
    u = rabi_unitary(omega, model.dt)
    code = int(model.obs)
    k = model.strength

    def run(start, count):
        uni, gau = ensemble_noise(seed, start, count, steps, 1)
        r, states, ok = kernels.simulate(initial.matrix, u, [code], [k], uni, gau, backend=backend)
        if not ok.all():
            raise DegenerateUpdate(f"realization {start + int(np.argmin(ok))} degenerate")
        eff, _, _, _, ok = kernels.effects(u, [code], [k], r, backend=backend)
        if not ok.all():
            raise EffectUnderflow(f"realization {start + int(np.argmin(ok))} underflowed")
        r = r[:, :, 0]
        z, zw, zc, zs, flag = kernels.estimates(states[:, :, 0], eff[:, :, 0], code, k, backend=backend)
        lp, ls, bad = kernels.log_likelihoods(r, z, zw, zc, k, backend=backend)
        m_ref = np.mean((r - z) ** 2, axis=1)
        m_alt = np.mean((r - zs) ** 2, axis=1)
        return (
            (m_ref - m_alt) / m_alt,
            np.sum(ls - lp, axis=1),
            m_ref,
            m_alt,
            np.count_nonzero(flag | bad, axis=1),
        )

    return run


def run_ensemble(
    initial: QubitState,
    omega: float,
    model: MeasurementModel,
    steps: int,
    realizations: int,
    master_seed: int,
    workers: int | None = None,
    chunk: int | None = None,
    backend: str | None = None,
) -> EnsembleResult:
    """``Q(z_S, z)`` and ``ln R(z_S, z)`` for every realization."""
    chunk = chunk or chunk_size(steps, 1)
    parts = map_chunks(
        _single_chunk(initial, omega, model, steps, master_seed, backend), realizations, chunk, workers
    )
    cols = [np.concatenate(c) for c in zip(*parts)]
    return EnsembleResult(*cols, n_steps=steps)


@dataclass
class DualEnsembleResult:
    """Per-realization ``Q(x^Z, x)``, ``Q(x_S^Z, x)``, ``Q(x_S, x)``."""

    q_xZ: np.ndarray
    q_xSZ: np.ndarray
    q_xS: np.ndarray
    anomalous: np.ndarray

    @property
    def fractions(self) -> tuple[float, float, float]:
        return tuple(float(np.mean(q > 0)) for q in (self.q_xZ, self.q_xSZ, self.q_xS))

    @property
    def size(self) -> int:
        return len(self.q_xZ)


def _dual_chunk(initial, dual: DualModel, seed, backend):
    u = dual.unitary
    rho0 = initial.matrix

    def run(start, count):
        uni, gau = ensemble_noise(seed, start, count, dual.steps, 2)
        r, states, ok = kernels.simulate(
            rho0, u, dual.codes, dual.strengths(), dual.to_slots(uni), dual.to_slots(gau), backend=backend
        )
        if not ok.all():
            raise DegenerateUpdate(f"realization {start + int(np.argmin(ok))} degenerate")
        x, _, _, xs, f1 = estimates_from_records(rho0, dual, r, ignorant=False, states=states, backend=backend)
        r_ign = r.copy()
        r_ign[:, :, dual.x_slot] = 0.0
        xz, _, _, xsz, f2 = estimates_from_records(rho0, dual, r_ign, ignorant=True, backend=backend)
        rx = r[:, :, dual.x_slot]
        m_ref = np.mean((rx - x) ** 2, axis=1)

        def q(est):
            m = np.mean((rx - est) ** 2, axis=1)
            return (m_ref - m) / m

        return q(xz), q(xsz), q(xs), np.count_nonzero(f1 | f2, axis=1)

    return run


def run_dual_ensemble(
    initial: QubitState,
    dual: DualModel,
    realizations: int,
    master_seed: int,
    workers: int | None = None,
    chunk: int | None = None,
    backend: str | None = None,
) -> DualEnsembleResult:
    chunk = chunk or chunk_size(dual.steps, 2)
    parts = map_chunks(_dual_chunk(initial, dual, master_seed, backend), realizations, chunk, workers)
    cols = [np.concatenate(c) for c in zip(*parts)]
    return DualEnsembleResult(*cols)
