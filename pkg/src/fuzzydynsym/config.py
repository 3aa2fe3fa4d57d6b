"""Repo-wide numerical constants and the run configuration record."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold used by library checks."""

    # exact-zero claims of the symbolic layer become relative claims in double precision
    float_zero: float = 1e-12
    hermitian: float = 1e-10
    residual: float = 1e-8  # eigenpair residual |H psi - E psi| / |psi|
    cluster: float = 1e-6  # eigenvalues within cluster * max(1, |E|) are degenerate
    conservation: float = 1e-8
    algebra: float = 1e-4  # projected Lenz / SO(4) closure residuals
    casimir: float = 1e-3
    boundary_band: float = 1e-9  # E(3) band, in units of 2 / lam^2
    oracle: float = 1e-4
    dirac: float = 1e-12


@dataclass(frozen=True)
class Units:
    """Unit convention of the Hamiltonian ``H = -(hbar^2 / 2m) Delta - q / r``."""

    hbar: float = 1.0
    mass: float = 1.0


TOL = Tolerances()
UNITS = Units()


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Resolved settings of one CLI invocation.

    Stored on disk as flat ``key = value`` lines; :meth:`dumps` and
    :meth:`loads` round-trip every field exactly (floats via ``repr``).
    """

    lam: float = 0.5
    q: float = 1.0
    n_max: int = 30
    mu: float = 0.5
    gamma: float = 1.0
    j: float = 0.5
    k: int = 3
    grid_points: int = 4000
    r_min: float = 1e-3
    r_max: float = 80.0
    residual_tol: float = TOL.residual
    cluster_tol: float = TOL.cluster
    boundary_band: float = TOL.boundary_band
    oracle_tol: float = TOL.oracle
    format: str = "json"
    output: str = ""
    cache_dir: str = ""
    sweep: bool = False
    ladder: tuple[int, ...] = field(default=())

    def validate(self) -> "RunConfig":
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigError("lambda must be a positive finite number")
        if self.n_max < 2:
            raise ConfigError("n_max must be at least 2")
        for name in ("residual_tol", "cluster_tol", "boundary_band", "oracle_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.grid_points < 200:
            raise ConfigError("grid_points must be at least 200")
        if not 0 < self.r_min < self.r_max:
            raise ConfigError("need 0 < r_min < r_max")
        if any(n < 2 for n in self.ladder):
            raise ConfigError("ladder entries must be at least 2")
        return self

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["ladder"] = list(self.ladder)
        return d

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                text = ",".join(str(x) for x in v)
            elif isinstance(v, float):
                text = repr(v)
            else:
                text = str(v)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        kinds = {f.name: f for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in kinds:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _convert(cls, key, val)
        return cls(**values)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def _convert(cls, key: str, val: str):
    default = getattr(cls(), key)
    try:
        if isinstance(default, bool):
            if val.lower() not in ("true", "false", "1", "0"):
                raise ValueError(val)
            return val.lower() in ("true", "1")
        if isinstance(default, tuple):
            return tuple(int(x) for x in val.split(",") if x.strip())
        if isinstance(default, int):
            return int(val)
        if isinstance(default, float):
            return float(val)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {val!r}") from None
    return val
