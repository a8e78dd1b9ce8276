"""Batch driver: scenario config in, CSV out.

    qsmooth --scenario ensemble --tau 2 --dt 0.01 --duration 50 --out fig3.csv
    qsmooth run.cfg --seed 7

The worker count (``--workers`` or ``QSMOOTH_WORKERS``) changes only the
runtime; every file is byte-identical for a given config and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .algebra import QubitState
from .config import SCENARIOS, ConfigError, ScenarioConfig, format_value, load_config
from .dual import DualModel, sweep_ratio
from .ensemble import run_dual_ensemble, run_ensemble as _run_ensemble, trajectory_rng
from .measurement import MeasurementModel
from .metrics import compare
from .smoother import smooth_series
from .trajectory import backward_pass, forward_pass


def _initial(cfg: ScenarioConfig) -> QubitState:
    return QubitState.from_bloch(*cfg.initial_bloch)


def _write(cfg: ScenarioConfig, columns: list[str], rows, footer: dict | None = None) -> Path:
    path = Path(cfg.output_path)
    lines = ["# qsmooth"]
    lines += [f"# {line}" for line in cfg.echo()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    for k, v in (footer or {}).items():
        lines.append(f"# {k} = {format_value(v)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise FloatingPointError("non-finite value in output")


def run_single(cfg: ScenarioConfig) -> Path:
    if cfg.scenario != "single":
        raise ConfigError("run_single needs scenario = single")
    c = cfg.in_rabi_units()
    model = MeasurementModel(c.dt, c.tau)
    record = forward_pass(_initial(c), c.omega, model, c.steps, trajectory_rng(c.master_seed, 0))
    effects = backward_pass(record)
    s = smooth_series(record, effects)
    res = compare(record, effects, s)
    _check_finite(record.readouts, s.z, s.z_w, s.z_c, s.z_S)
    rows = zip(
        s.times.tolist(), record.readouts.tolist(), s.z.tolist(), s.z_w.tolist(),
        s.z_c.tolist(), s.z_S.tolist(), s.anomalous.astype(int).tolist(),
    )
    footer = {"Q": res.q, "scaled_lnR": res.scaled_ln_r, "anomalous_total": res.anomalous_count}
    return _write(cfg, ["t", "r", "z", "z_w", "z_c", "z_S", "flag"], rows, footer)


def run_ensemble(cfg: ScenarioConfig) -> Path:
    if cfg.scenario != "ensemble":
        raise ConfigError("run_ensemble needs scenario = ensemble")
    c = cfg.in_rabi_units()
    res = _run_ensemble(
        _initial(c), c.omega, MeasurementModel(c.dt, c.tau), c.steps, c.realizations,
        c.master_seed, workers=c.workers,
    )
    _check_finite(res.q, res.scaled_ln_r)
    rows = zip(range(res.size), res.q.tolist(), res.scaled_ln_r.tolist(), res.anomalous.tolist())
    return _write(cfg, ["realization", "Q", "scaled_lnR", "anomalous"], rows, res.summary())


def _dual_model(c: ScenarioConfig) -> DualModel:
    return DualModel.build(c.dt, c.tau, c.resolved_tau_x(), c.omega, c.steps, c.dual_order)


def run_dual(cfg: ScenarioConfig) -> Path:
    if cfg.scenario != "dual":
        raise ConfigError("run_dual needs scenario = dual")
    c = cfg.in_rabi_units()
    res = run_dual_ensemble(_initial(c), _dual_model(c), c.realizations, c.master_seed, workers=c.workers)
    _check_finite(res.q_xZ, res.q_xSZ, res.q_xS)
    rows = zip(range(res.size), res.q_xZ.tolist(), res.q_xSZ.tolist(), res.q_xS.tolist())
    fx = res.fractions
    footer = {
        "frac_xZ": fx[0],
        "frac_xSZ": fx[1],
        "frac_xS": fx[2],
        "size": res.size,
        "anomalous_total": int(res.anomalous.sum()),
    }
    return _write(cfg, ["realization", "Q_xZ", "Q_xSZ", "Q_xS"], rows, footer)


def run_dual_sweep(cfg: ScenarioConfig) -> Path:
    if cfg.scenario != "dual_sweep":
        raise ConfigError("run_dual_sweep needs scenario = dual_sweep")
    c = cfg.in_rabi_units()
    base = _dual_model(c)
    rows = sweep_ratio(base, c.ratios, c.realizations, c.master_seed, _initial(c), workers=c.workers)
    table = [(r.ratio, r.frac_xZ, r.frac_xSZ, r.frac_xS, r.n) for r in rows]
    return _write(cfg, ["ratio", "frac_xZ", "frac_xSZ", "frac_xS", "n"], table)


RUNNERS = {
    "single": run_single,
    "ensemble": run_ensemble,
    "dual": run_dual,
    "dual_sweep": run_dual_sweep,
}


def run(cfg: ScenarioConfig) -> Path:
    return RUNNERS[cfg.scenario](cfg)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsmooth", description="Smoothed-estimate simulations of a monitored qubit.")
    p.add_argument("config", nargs="?", help="flat 'key = value' file; flags override it")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--omega", type=float, help="Rabi frequency; times are in units of 2pi/omega")
    p.add_argument("--tau", type=float, help="collapse time (the Z meter in dual scenarios)")
    p.add_argument("--tau-x", type=float, help="X meter collapse time (dual); default 25*tau")
    p.add_argument("--dt", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--initial-bloch", help="x,y,z")
    p.add_argument("--ratios", help="comma-separated tau_x/tau_z values (dual_sweep)")
    p.add_argument("--dual-order", choices=("xz", "zx"))
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="output_path")
    return p


def main(argv=None) -> int:
    args = vars(_parser().parse_args(argv))
    path = args.pop("config")
    try:
        cfg = load_config(path, args)
        out = run(cfg)
    except ConfigError as exc:
        print(f"qsmooth: config error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
