"""Pure-numpy kernels: loop over time, vectorize over the trajectory batch."""

import numpy as np

from ._ops import (
    TINY,
    expect,
    frobenius,
    hermitize,
    log_kraus_scale,
    log_predictive,
    log_smoothed,
    max_eig,
    pauli_left,
    pauli_sandwich,
    real_trace,
    sandwich,
    sandwich_adj,
    scale,
    scaled_kraus,
    trace_product,
)


def _tuple(a):
    return (a[..., 0], a[..., 1], a[..., 2], a[..., 3])


def _run(rho0, u, codes, ks, readouts, uni, gau, sample):
    n_traj, n_steps, n_meas = readouts.shape
    states = np.empty((n_traj, n_steps, n_meas, 4), dtype=np.complex128)
    ok = np.ones(n_traj, dtype=bool)
    ones = np.ones(n_traj, dtype=np.complex128)
    rho = tuple(ones * rho0[q] for q in range(4))
    ut = tuple(complex(u[q]) for q in range(4))
    for j in range(n_steps):
        rho = hermitize(sandwich(ut, rho))
        for i in range(n_meas):
            states[:, j, i] = np.stack(rho, axis=-1)
            code = int(codes[i])
            k = float(ks[i])
            if sample:
                z = expect(code, rho)
                a = np.where(uni[:, j, i] < 0.5 * (1.0 + z), 1.0, -1.0)
                readouts[:, j, i] = a + gau[:, j, i] / np.sqrt(k)
            rho = sandwich(scaled_kraus(code, readouts[:, j, i], k), rho)
            norm = real_trace(rho)
            bad = ~(norm > TINY)
            ok &= ~bad
            norm = np.where(bad, 1.0, norm)
            rho = hermitize(scale(rho, 1.0 / norm))
    return states, ok


def simulate(rho0, u, codes, ks, uni, gau):
    readouts = np.zeros(uni.shape)
    states, ok = _run(rho0, u, codes, ks, readouts, uni, gau, True)
    return readouts, states, ok


def filter_states(rho0, u, codes, ks, readouts):
    return _run(rho0, u, codes, ks, np.array(readouts, dtype=float), None, None, False)


def effects(u, codes, ks, readouts):
    n_traj, n_steps, n_meas = readouts.shape
    out = np.empty((n_traj, n_steps, n_meas, 4), dtype=np.complex128)
    lognorm = np.empty((n_traj, n_steps, n_meas))
    ok = np.ones(n_traj, dtype=bool)
    ut = tuple(complex(u[q]) for q in range(4))
    one = np.ones(n_traj, dtype=np.complex128)
    e = (one, 0 * one, 0 * one, one)
    lg = np.zeros(n_traj)
    for j in range(n_steps - 1, -1, -1):
        for i in range(n_meas - 1, -1, -1):
            out[:, j, i] = np.stack(e, axis=-1)
            lognorm[:, j, i] = lg
            r = readouts[:, j, i]
            e = sandwich_adj(scaled_kraus(int(codes[i]), r, float(ks[i])), e)
            lg = lg + 2.0 * log_kraus_scale(r, float(ks[i]))
            if i == 0:
                e = sandwich_adj(ut, e)
            bad = ~(real_trace(e) > TINY)
            ok &= ~bad
            lam = np.where(bad, 1.0, max_eig(e))
            e = hermitize(scale(e, 1.0 / lam))
            lg = lg + np.log(lam)
    return out, lognorm, np.stack(e, axis=-1), lg, ok


def estimates(states, effs, code, k):
    rho = _tuple(states)
    e = _tuple(effs)
    ov = trace_product(e, rho).real
    guard = 1e-12 * frobenius(e) * frobenius(rho)
    flag = ~(ov >= guard)
    ov = np.where(flag, np.maximum(ov, guard), ov)
    z = expect(code, rho)
    zw = trace_product(e, pauli_left(code, rho)).real / ov
    zc = trace_product(e, pauli_sandwich(code, rho)).real / ov
    eps = np.exp(-0.5 * k)
    zs = zw / (0.5 * (1.0 + eps) + 0.5 * (1.0 - eps) * zc)
    return z, zw, zc, zs, flag


def log_likelihoods(r, z, zw, zc, k):
    lp = log_predictive(r, z, k)
    ls, inner = log_smoothed(r, zw, zc, k)
    return lp, ls, ~(inner > 0.0)
