"""Flat ``key = value`` scenario configuration.

Times (``tau``, ``tau_x``, ``dt``, ``duration``) may be given in any unit
consistent with ``omega``; they are converted to Rabi periods on load, so
internally ``omega == 2 pi`` always.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

SCENARIOS = ("single", "ensemble", "dual", "dual_sweep")
STEP_RTOL = 1e-9


class ConfigError(ValueError):
    pass


def _floats(text) -> tuple[float, ...]:
    if isinstance(text, str):
        text = [t for t in text.replace(",", " ").split() if t]
    return tuple(float(t) for t in text)


@dataclass
class ScenarioConfig:
    scenario: str = "ensemble"
    omega: float = 2 * math.pi
    tau: float = 2.0
    tau_x: float | None = None
    dt: float = 0.01
    duration: float = 50.0
    realizations: int = 10_000
    master_seed: int = 0
    initial_bloch: tuple[float, float, float] = (0.0, 0.0, 0.0)
    output_path: str = field(default="qsmooth.csv", metadata={"echo": False})
    ratios: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0)
    dual_order: str = "xz"
    workers: int | None = field(default=None, metadata={"echo": False})

    @property
    def rabi_period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def steps(self) -> int:
        n = self.duration / self.dt
        steps = round(n)
        if steps < 1 or abs(n - steps) > STEP_RTOL * max(1.0, n):
            raise ConfigError(f"duration/dt = {n!r} is not a positive integer")
        return int(steps)

    def validate(self) -> "ScenarioConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        for name in ("omega", "tau", "dt", "duration"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        self.steps
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if len(self.initial_bloch) != 3:
            raise ConfigError("initial_bloch needs three components")
        if math.sqrt(sum(c * c for c in self.initial_bloch)) > 1 + 1e-10:
            raise ConfigError("initial_bloch must have length <= 1")
        if self.scenario in ("dual", "dual_sweep"):
            if self.tau_x is not None and not self.tau_x > self.tau:
                raise ConfigError("tau_x must exceed tau (the Z meter dominates)")
            if self.dual_order not in ("xz", "zx"):
                raise ConfigError("dual_order must be 'xz' or 'zx'")
            if any(r <= 1 for r in self.ratios) or len(set(self.ratios)) != len(self.ratios):
                raise ConfigError("ratios must be distinct and > 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def in_rabi_units(self) -> "ScenarioConfig":
        """Copy with times measured in Rabi periods and ``omega = 2 pi``."""
        tr = self.rabi_period
        return dataclasses.replace(
            self,
            omega=2 * math.pi,
            tau=self.tau / tr,
            tau_x=None if self.tau_x is None else self.tau_x / tr,
            dt=self.dt / tr,
            duration=self.duration / tr,
        )

    def resolved_tau_x(self) -> float:
        return 25.0 * self.tau if self.tau_x is None else self.tau_x

    def echo(self) -> list[str]:
        """Header lines ``key = value``.

        Worker count and output path are left out so that reruns compare
        byte for byte.
        """
        lines = []
        for f in dataclasses.fields(self):
            if f.metadata.get("echo", True):
                lines.append(f"{f.name} = {format_value(getattr(self, f.name))}")
        return lines


def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (tuple, list)):
        return ",".join(format_value(x) for x in v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        return repr(float(v))
    return str(v)


_CONVERTERS = {
    "scenario": str,
    "omega": float,
    "tau": float,
    "tau_x": lambda s: None if str(s).lower() == "none" else float(s),
    "dt": float,
    "duration": float,
    "realizations": int,
    "master_seed": int,
    "initial_bloch": _floats,
    "output_path": str,
    "ratios": _floats,
    "dual_order": str,
    "workers": lambda s: None if str(s).lower() == "none" else int(s),
}

_ALIASES = {"seed": "master_seed", "out": "output_path", "output": "output_path", "T": "duration"}


def _key(raw: str) -> str:
    k = raw.strip().replace("-", "_")
    return _ALIASES.get(k, k)


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        values[_key(k)] = v.strip()
    return values


def build_config(values: dict) -> ScenarioConfig:
    kwargs = {}
    for raw, v in values.items():
        k = _key(raw)
        if k not in _CONVERTERS:
            raise ConfigError(f"unknown key {raw!r}")
        try:
            kwargs[k] = _CONVERTERS[k](v) if isinstance(v, str) else v
        except ValueError as exc:
            raise ConfigError(f"bad value for {k}: {v!r}") from exc
    if "initial_bloch" in kwargs:
        kwargs["initial_bloch"] = tuple(float(c) for c in kwargs["initial_bloch"])
    if "ratios" in kwargs:
        kwargs["ratios"] = tuple(float(c) for c in kwargs["ratios"])
    return ScenarioConfig(**kwargs).validate()


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ScenarioConfig:
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update({_key(k): v for k, v in (overrides or {}).items() if v is not None})
    return build_config(values)
