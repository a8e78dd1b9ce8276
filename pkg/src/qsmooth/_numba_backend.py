"""Compiled kernels: one trajectory at a time, entries held in registers."""

import numpy as np
from numba import njit

from . import _ops

_jit = njit(cache=True, nogil=True)

sandwich = _jit(_ops.sandwich)
sandwich_adj = _jit(_ops.sandwich_adj)
scaled_kraus = _jit(_ops.scaled_kraus)
log_kraus_scale = _jit(_ops.log_kraus_scale)
expect = _jit(_ops.expect)
pauli_sandwich = _jit(_ops.pauli_sandwich)
pauli_left = _jit(_ops.pauli_left)
trace_product = _jit(_ops.trace_product)
hermitize = _jit(_ops.hermitize)
scale = _jit(_ops.scale)
real_trace = _jit(_ops.real_trace)
max_eig = _jit(_ops.max_eig)
frobenius = _jit(_ops.frobenius)
log_predictive = _jit(_ops.log_predictive)
log_smoothed = _jit(_ops.log_smoothed)

TINY = _ops.TINY


@_jit
def _run(rho0, u, codes, ks, readouts, uni, gau, sample):
    n_traj, n_steps, n_meas = readouts.shape
    states = np.empty((n_traj, n_steps, n_meas, 4), dtype=np.complex128)
    ok = np.ones(n_traj, dtype=np.bool_)
    ut = (u[0], u[1], u[2], u[3])
    for b in range(n_traj):
        rho = (rho0[0], rho0[1], rho0[2], rho0[3])
        for j in range(n_steps):
            rho = hermitize(sandwich(ut, rho))
            for i in range(n_meas):
                states[b, j, i, 0] = rho[0]
                states[b, j, i, 1] = rho[1]
                states[b, j, i, 2] = rho[2]
                states[b, j, i, 3] = rho[3]
                code = codes[i]
                k = ks[i]
                if sample:
                    z = expect(code, rho)
                    a = 1.0 if uni[b, j, i] < 0.5 * (1.0 + z) else -1.0
                    readouts[b, j, i] = a + gau[b, j, i] / np.sqrt(k)
                rho = sandwich(scaled_kraus(code, readouts[b, j, i], k), rho)
                norm = real_trace(rho)
                if not norm > TINY:
                    ok[b] = False
                    norm = 1.0
                rho = hermitize(scale(rho, 1.0 / norm))
    return states, ok


def simulate(rho0, u, codes, ks, uni, gau):
    readouts = np.zeros(uni.shape)
    states, ok = _run(rho0, u, codes, ks, readouts, uni, gau, True)
    return readouts, states, ok


def filter_states(rho0, u, codes, ks, readouts):
    readouts = np.ascontiguousarray(readouts, dtype=np.float64)
    dummy = np.zeros((1, 1, 1))
    return _run(rho0, u, codes, ks, readouts.copy(), dummy, dummy, False)


@_jit
def effects(u, codes, ks, readouts):
    n_traj, n_steps, n_meas = readouts.shape
    out = np.empty((n_traj, n_steps, n_meas, 4), dtype=np.complex128)
    lognorm = np.empty((n_traj, n_steps, n_meas))
    prior = np.empty((n_traj, 4), dtype=np.complex128)
    prior_log = np.empty(n_traj)
    ok = np.ones(n_traj, dtype=np.bool_)
    ut = (u[0], u[1], u[2], u[3])
    one = 1.0 + 0j
    zero = 0.0 + 0j
    for b in range(n_traj):
        e = (one, zero, zero, one)
        lg = 0.0
        for j in range(n_steps - 1, -1, -1):
            for i in range(n_meas - 1, -1, -1):
                out[b, j, i, 0] = e[0]
                out[b, j, i, 1] = e[1]
                out[b, j, i, 2] = e[2]
                out[b, j, i, 3] = e[3]
                lognorm[b, j, i] = lg
                r = readouts[b, j, i]
                e = sandwich_adj(scaled_kraus(codes[i], r, ks[i]), e)
                lg += 2.0 * log_kraus_scale(r, ks[i])
                if i == 0:
                    e = sandwich_adj(ut, e)
                if not real_trace(e) > TINY:
                    ok[b] = False
                    continue
                lam = max_eig(e)
                e = hermitize(scale(e, 1.0 / lam))
                lg += np.log(lam)
        prior[b, 0] = e[0]
        prior[b, 1] = e[1]
        prior[b, 2] = e[2]
        prior[b, 3] = e[3]
        prior_log[b] = lg
    return out, lognorm, prior, prior_log, ok


@_jit
def estimates(states, effs, code, k):
    shape = states.shape[:-1]
    flat_s = states.reshape(-1, 4)
    flat_e = effs.reshape(-1, 4)
    n = flat_s.shape[0]
    z = np.empty(n)
    zw = np.empty(n)
    zc = np.empty(n)
    zs = np.empty(n)
    flag = np.zeros(n, dtype=np.bool_)
    eps = np.exp(-0.5 * k)
    for p in range(n):
        rho = (flat_s[p, 0], flat_s[p, 1], flat_s[p, 2], flat_s[p, 3])
        e = (flat_e[p, 0], flat_e[p, 1], flat_e[p, 2], flat_e[p, 3])
        ov = trace_product(e, rho).real
        guard = 1e-12 * frobenius(e) * frobenius(rho)
        if not ov >= guard:
            flag[p] = True
            ov = max(ov, guard)
        z[p] = expect(code, rho)
        zw[p] = trace_product(e, pauli_left(code, rho)).real / ov
        zc[p] = trace_product(e, pauli_sandwich(code, rho)).real / ov
        zs[p] = zw[p] / (0.5 * (1.0 + eps) + 0.5 * (1.0 - eps) * zc[p])
    return (
        z.reshape(shape),
        zw.reshape(shape),
        zc.reshape(shape),
        zs.reshape(shape),
        flag.reshape(shape),
    )


@_jit
def log_likelihoods(r, z, zw, zc, k):
    shape = r.shape
    rf = r.ravel()
    zf = z.ravel()
    zwf = zw.ravel()
    zcf = zc.ravel()
    n = rf.shape[0]
    lp = np.empty(n)
    ls = np.empty(n)
    bad = np.zeros(n, dtype=np.bool_)
    for p in range(n):
        lp[p] = log_predictive(rf[p], zf[p], k)
        v, inner = log_smoothed(rf[p], zwf[p], zcf[p], k)
        ls[p] = v
        bad[p] = not inner > 0.0
    return lp.reshape(shape), ls.reshape(shape), bad.reshape(shape)
