"""Run configuration: a flat, versioned JSON document that rejects unknown keys."""
from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from typing import Optional

CONFIG_VERSION = 1
OUTPUT_ROOT_ENV = "BOUSSINESQ1D_OUTPUT_ROOT"

SCENARIOS = ("blowup", "zero", "transport_only", "custom_tabulated")
SOLVERS = ("lagrangian", "picard_crosscheck")
LAYOUTS = ("uniform", "graded")


class ConfigError(ValueError):
    """The configuration document is malformed or violates a field constraint."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "blowup"
    M: float = 200.0
    N: int = 4000
    layout: str = "uniform"
    dt_max: float = 1e-2
    cfl: float = 0.5
    t_end: float = 1.0
    sup_dxu_max: float = 1e6
    gap_min: float = 1e-10
    output_every: int = 1
    output_dir: str = "run"
    seed: int = 0
    n_max: int = 8
    solver: str = "lagrangian"
    regrid: bool = False
    table: Optional[str] = None  # CSV with columns x, rho0, omega0 for custom_tabulated
    picard_iterations: int = 8
    version: int = CONFIG_VERSION

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.version != CONFIG_VERSION:
            out.append(f"unsupported config version {self.version!r}")
        if self.scenario not in SCENARIOS:
            out.append(f"scenario must be one of {SCENARIOS}")
        if self.solver not in SOLVERS:
            out.append(f"solver must be one of {SOLVERS}")
        if self.layout not in LAYOUTS:
            out.append(f"layout must be one of {LAYOUTS}")
        for name in ("dt_max", "t_end", "sup_dxu_max", "gap_min"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                out.append(f"{name} must be a positive finite number")
        if not (isinstance(self.M, (int, float)) and math.isfinite(self.M) and self.M >= 0):
            out.append("M must be a nonnegative finite number")
        if not (isinstance(self.cfl, (int, float)) and 0 < self.cfl <= 1):
            out.append("cfl must lie in (0, 1]")
        for name, lo in (("N", 16), ("output_every", 1), ("n_max", 1), ("picard_iterations", 1), ("seed", 0)):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < lo:
                out.append(f"{name} must be an integer >= {lo}")
        if not isinstance(self.regrid, bool):
            out.append("regrid must be true or false")
        if self.scenario == "custom_tabulated" and not self.table:
            out.append("custom_tabulated needs a table path")
        if not isinstance(self.output_dir, str) or not self.output_dir:
            out.append("output_dir must be a nonempty string")
        return out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "version" not in doc:
            raise ConfigError("config needs a 'version' field")
        doc = dict(doc)
        # JSON has one number type; accept 200 for M and 4000.0 for N only when exact
        for name in ("M", "dt_max", "cfl", "t_end", "sup_dxu_max", "gap_min"):
            if isinstance(doc.get(name), int) and not isinstance(doc.get(name), bool):
                doc[name] = float(doc[name])
        for name in ("N", "output_every", "n_max", "picard_iterations", "seed", "version"):
            v = doc.get(name)
            if isinstance(v, float) and v.is_integer():
                doc[name] = int(v)
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)

    def output_path(self) -> str:
        """output_dir, placed under $BOUSSINESQ1D_OUTPUT_ROOT when that is set and the path is relative."""
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if root and not os.path.isabs(self.output_dir):
            return os.path.join(root, self.output_dir)
        return self.output_dir


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return RunConfig.from_json(text)
