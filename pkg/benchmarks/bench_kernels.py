"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--batch 256] [--steps 5000] [--repeat 3]

Each kernel runs on the same batch with both backends; the numba time
excludes compilation (one warm-up call first). Outputs are also compared.
"""

import argparse
import time

import numpy as np

from qsmooth import kernels
from qsmooth.algebra import Observable, rabi_unitary
from qsmooth.ensemble import ensemble_noise


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    dt, tau = 0.01, 2.0
    k = dt / tau
    u = rabi_unitary(2 * np.pi, dt)
    rho0 = 0.5 * np.eye(2)
    code = [int(Observable.Z)]
    uni, gau = ensemble_noise(0, 0, args.batch, args.steps, 1)

    r, states, _ = kernels.simulate(rho0, u, code, [k], uni, gau, backend="numpy")
    eff = kernels.effects(u, code, [k], r, backend="numpy")[0]
    est = kernels.estimates(states[:, :, 0], eff[:, :, 0], code[0], k, backend="numpy")

    cases = {
        "simulate": lambda b: kernels.simulate(rho0, u, code, [k], uni, gau, backend=b)[0],
        "filter_states": lambda b: kernels.filter_states(rho0, u, code, [k], r, backend=b)[0],
        "effects": lambda b: kernels.effects(u, code, [k], r, backend=b)[0],
        "estimates": lambda b: kernels.estimates(states[:, :, 0], eff[:, :, 0], code[0], k, backend=b)[3],
        "log_likelihoods": lambda b: kernels.log_likelihoods(r[:, :, 0], *est[:3], k, backend=b)[1],
    }

    print(f"batch={args.batch} steps={args.steps} best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, fn in cases.items():
        fn("numba")  # compile
        t_np, out_np = best_of(lambda: fn("numpy"), args.repeat)
        t_nb, out_nb = best_of(lambda: fn("numba"), args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_np) - np.asarray(out_nb))))
        print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
