"""Charge-dyon (Zwanziger) problem: reduction, quantization, fields, levels, radial oracle.

Units are Heaviside-Lorentz with ``c = 1``; the magnetic field of a
monopole of charge ``g`` is ``g r / (4 pi r^3)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .config import TOL

__all__ = [
    "BoundSectorError",
    "CrossCheck",
    "DyonSystem",
    "GridTooCoarseError",
    "LevelRow",
    "LevelTable",
    "QuantizationError",
    "RadialGrid",
    "RadialResult",
    "ReducedDyon",
    "StringProximityError",
    "casimir_values",
    "cross_check",
    "curl",
    "curl_check",
    "FieldCheck",
    "dirac_check",
    "flux",
    "level_table",
    "monopole_field",
    "pi_algebra_check",
    "radial_oracle",
    "random_off_string_points",
    "read_points",
    "reduce_two_body",
    "vector_potential",
]

FOUR_PI = 4.0 * math.pi


class QuantizationError(ValueError):
    """``2 mu`` is not an integer."""


class BoundSectorError(ValueError):
    """No bound states: the Coulomb coupling is not attractive."""


class StringProximityError(ValueError):
    """Evaluation point too close to the Dirac string or the origin."""


class GridTooCoarseError(RuntimeError):
    """Successive refinements do not show the expected ``h^2`` behaviour."""


# ---------------------------------------------------------------------------
# two-body reduction


@dataclass(frozen=True)
class DyonSystem:
    e1: float
    e2: float
    g1: float
    g2: float
    m1: float = 1.0
    m2: float = 1.0

    def __post_init__(self):
        if not (self.m1 > 0 and self.m2 > 0):
            raise ValueError("masses must be positive")


@dataclass(frozen=True)
class ReducedDyon:
    """Relative-motion parameters: reduced mass ``m``, monopole coupling ``mu``, Coulomb coupling ``gamma``."""

    m: float
    mu: float
    gamma: float

    def u(self, E: float) -> float:
        """Velocity scale ``sqrt(-2E/m)`` of a bound energy."""
        if E >= 0:
            raise ValueError("u is defined for E < 0")
        return math.sqrt(-2.0 * E / self.m)

    def v(self, E: float) -> float:
        """Velocity scale ``sqrt(2E/m)`` of a scattering energy."""
        if E <= 0:
            raise ValueError("v is defined for E > 0")
        return math.sqrt(2.0 * E / self.m)

    def gamma_prime(self, E: float) -> float:
        """``gamma / u`` for bound energies, ``gamma / v`` for scattering ones."""
        return self.gamma / (self.u(E) if E < 0 else self.v(E))


def reduce_two_body(s: DyonSystem, mu_sign: int = 1, gamma_sign: int = 1) -> ReducedDyon:
    """``m = m1 m2/(m1+m2)``, ``mu = (e1 g2 - e2 g1)/4pi``, ``gamma = -(e1 e2 + g1 g2)/4pi``.

    ``gamma > 0`` is binding.  The two sign arguments flip the conventions
    for callers that use the opposite orientation.
    """
    if mu_sign not in (1, -1) or gamma_sign not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    m = s.m1 * s.m2 / (s.m1 + s.m2)
    mu = mu_sign * (s.e1 * s.g2 - s.e2 * s.g1) / FOUR_PI
    gamma = -gamma_sign * (s.e1 * s.e2 + s.g1 * s.g2) / FOUR_PI
    return ReducedDyon(m, mu + 0.0, gamma + 0.0)


def dirac_check(mu: float, tol: float = TOL.dirac) -> bool:
    """True when ``2 mu`` is an integer within ``tol``."""
    return abs(2.0 * mu - round(2.0 * mu)) <= tol


def _half_integer(mu: float) -> Fraction:
    if not dirac_check(mu):
        raise QuantizationError(f"mu = {mu!r} violates the Dirac condition (2 mu must be an integer)")
    return Fraction(round(2 * mu), 2)


# ---------------------------------------------------------------------------
# fields


def _point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("points must have three components")
    return p


def monopole_field(g: float, point) -> np.ndarray:
    """``B = (g / 4pi) r / r^3``; accepts one point or an ``(N, 3)`` array."""
    p = _point(point)
    r = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(r == 0):
        raise StringProximityError("the monopole field is singular at the origin")
    return g / FOUR_PI * p / r**3


def vector_potential(g: float, point, n=(0.0, 0.0, 1.0), delta: float = 1e-8) -> np.ndarray:
    """Potential ``(g/4pi) (r x n)(r . n) / (r [r^2 - (r . n)^2])`` singular on the line through ``n``.

    Points closer than ``delta`` to that line (or to the origin) raise
    :class:`StringProximityError`.
    """
    p = _point(point)
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    r = np.linalg.norm(p, axis=-1, keepdims=True)
    rn = p @ n
    rho2 = r[..., 0] ** 2 - rn**2
    if np.any(np.sqrt(np.maximum(rho2, 0.0)) < delta):
        raise StringProximityError(f"point within {delta:g} of the Dirac string")
    return g / FOUR_PI * np.cross(p, n) * (rn / (r[..., 0] * rho2))[..., None]


def curl(fn, point, h: float = 1e-5) -> np.ndarray:
    """Central-difference curl of ``fn`` at one point."""
    p = _point(point)
    J = np.empty((3, 3))  # J[i, j] = d fn_i / d x_j
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (fn(p + e) - fn(p - e)) / (2 * h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def flux(g: float, radius: float = 1.0, center=(0.0, 0.0, 0.0), order: int = 64) -> float:
    """Flux of the monopole field through a sphere, by Gauss-Legendre x trapezoid quadrature."""
    c = np.asarray(center, dtype=float)
    x, wx = np.polynomial.legendre.leggauss(order)  # cos(theta)
    phi = np.linspace(0, 2 * np.pi, 2 * order, endpoint=False)
    ct, ph = np.meshgrid(x, phi, indexing="ij")
    st = np.sqrt(1 - ct**2)
    nrm = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    B = monopole_field(g, c + radius * nrm)
    integrand = np.sum(B * nrm, axis=-1) * radius**2
    return float(np.sum(wx[:, None] * integrand) * (2 * np.pi / (2 * order)))


def random_off_string_points(count: int, seed: int = 0, n=(0.0, 0.0, 1.0), min_rho: float = 0.2) -> np.ndarray:
    """Points in the shell ``0.5 <= r <= 2`` at distance at least ``min_rho`` from the string line."""
    rng = np.random.default_rng(seed)
    n = np.asarray(n, dtype=float) / np.linalg.norm(n)
    out = []
    while len(out) < count:
        p = rng.uniform(-2, 2, 3)
        r = np.linalg.norm(p)
        if 0.5 <= r <= 2 and math.sqrt(max(r * r - (p @ n) ** 2, 0.0)) >= min_rho:
            out.append(p)
    return np.array(out)


@dataclass
class FieldCheck:
    max_error: float
    h: float
    points: int
    ratio: float | None = None  # error(h) / error(h/2)


def curl_check(g: float, points: np.ndarray, n=(0.0, 0.0, 1.0), h: float = 1e-5) -> FieldCheck:
    """Largest relative error of ``curl A - B`` over ``points``."""
    err = 0.0
    for p in points:
        c = curl(lambda x: vector_potential(g, x, n), p, h)
        B = monopole_field(g, p)
        err = max(err, float(np.linalg.norm(c - B) / np.linalg.norm(B)))
    return FieldCheck(err, h, len(points))


def pi_algebra_check(mu: float, points: np.ndarray, h: float = 1e-5, n=(0.0, 0.0, 1.0)) -> FieldCheck:
    """Coefficient function of ``[pi_i, pi_j] = i mu eps_ijk x_k / r^3``.

    Compares ``d_i(mu A_j) - d_j(mu A_i)`` with ``mu eps_ijk x_k / r^3`` for
    the unit-strength potential, pointwise by central differences.  The
    returned ratio compares the errors at ``h`` and ``h/2``.
    """

    def coeff_error(step: float) -> float:
        worst = 0.0
        for p in points:
            c = curl(lambda x: mu * vector_potential(FOUR_PI, x, n), p, step)
            exact = mu * p / np.linalg.norm(p) ** 3
            scale = np.linalg.norm(p / np.linalg.norm(p) ** 3)
            worst = max(worst, float(np.linalg.norm(c - exact) / scale))
        return worst

    e1, e2 = coeff_error(h), coeff_error(h / 2)
    return FieldCheck(e1, h, len(points), e1 / e2 if e2 > 0 else None)


def read_points(source: str | Path | io.TextIOBase) -> np.ndarray:
    """Points from CSV text with header ``x,y,z``."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_points(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["x", "y", "z"]:
        raise ValueError("point files need the header x,y,z")
    rows = [[float(row[k]) for k in ("x", "y", "z")] for row in reader]
    return np.array(rows, dtype=float).reshape(-1, 3)


# ---------------------------------------------------------------------------
# algebraic level structure


@dataclass(frozen=True)
class LevelRow:
    n: Fraction
    energy: float
    j_values: tuple[Fraction, ...]
    j_plus: Fraction
    j_minus: Fraction
    degeneracy: int

    @property
    def gamma_prime(self) -> Fraction:
        return self.n

    def identities_hold(self, mu: Fraction) -> bool:
        return (
            self.j_plus - self.j_minus == abs(mu)
            and self.j_plus + self.j_minus + 1 == self.gamma_prime
            and (2 * self.j_plus + 1) * (2 * self.j_minus + 1) == self.degeneracy
            and sum(2 * j + 1 for j in self.j_values) == self.degeneracy
            and self.degeneracy == self.n**2 - mu**2
        )


@dataclass(frozen=True)
class LevelTable:
    mu: Fraction
    gamma: float
    m: float
    rows: tuple[LevelRow, ...]

    def as_dict(self) -> dict:
        return {
            "mu": str(self.mu),
            "gamma": self.gamma,
            "m": self.m,
            "rows": [
                {
                    "n": str(r.n),
                    "energy": r.energy,
                    "j_values": [str(j) for j in r.j_values],
                    "j_plus": str(r.j_plus),
                    "j_minus": str(r.j_minus),
                    "degeneracy": r.degeneracy,
                }
                for r in self.rows
            ],
        }

    CSV_COLUMNS = ("n", "energy", "j_min", "j_max", "j_plus", "j_minus", "degeneracy")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, f"{r.energy:.12g}", r.j_values[0], r.j_values[-1], r.j_plus, r.j_minus, r.degeneracy])
        return buf.getvalue()


def level_table(mu: float, gamma: float, count: int = 3, m: float = 1.0) -> LevelTable:
    """Bound levels ``n = |mu| + 1 + k`` with ``E_n = -m gamma^2 / (2 n^2)``.

    ``j`` runs from ``|mu|`` to ``n - 1``; ``j_(+-) = (n +- |mu| - 1)/2``.
    All labels are exact fractions.
    """
    mu_q = _half_integer(mu)
    if not gamma > 0:
        raise BoundSectorError("bound states need gamma > 0")
    if count < 1:
        raise ValueError("count must be positive")
    a = abs(mu_q)
    rows = []
    for k in range(count):
        n = a + 1 + k
        js = tuple(a + i for i in range(int(n - a)))
        rows.append(
            LevelRow(
                n=n,
                energy=-m * gamma**2 / (2.0 * float(n) ** 2),
                j_values=js,
                j_plus=(n + a - 1) / 2,
                j_minus=(n - a - 1) / 2,
                degeneracy=int(n * n - a * a),
            )
        )
    return LevelTable(mu_q, float(gamma), float(m), tuple(rows))


def casimir_values(mu: float, gamma_prime: float, branch: str = "bound") -> float:
    """``J^2 + N^2 = gamma'^2 + mu^2 - 1`` (bound) or ``J^2 - K^2 = mu^2 - gamma'^2 - 1`` (scattering)."""
    if branch == "bound":
        return gamma_prime**2 + mu**2 - 1.0
    if branch == "scattering":
        return mu**2 - gamma_prime**2 - 1.0
    raise ValueError("branch must be 'bound' or 'scattering'")


# ---------------------------------------------------------------------------
# radial oracle


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid with Dirichlet walls.

    ``inner="origin"`` puts the inner wall at ``r = 0`` (regularity of
    ``u = r R``) and ``r_min`` only bounds the spacing from below;
    ``inner="r_min"`` puts the wall at ``r_min``.
    """

    r_min: float = 1e-3
    r_max: float = 80.0
    points: int = 4000
    inner: str = "origin"

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.points < 200:
            raise ValueError("need at least 200 grid points")
        if self.inner not in ("origin", "r_min"):
            raise ValueError("inner must be 'origin' or 'r_min'")
        if self.spacing < self.r_min and self.inner == "origin":
            raise ValueError("grid spacing below r_min")

    @property
    def wall(self) -> float:
        return 0.0 if self.inner == "origin" else self.r_min

    @property
    def spacing(self) -> float:
        return (self.r_max - self.wall) / (self.points + 1)

    def nodes(self) -> np.ndarray:
        return self.wall + self.spacing * np.arange(1, self.points + 1)

    def refined(self) -> "RadialGrid":
        """Half the spacing, same walls."""
        r_min = self.r_min if self.inner == "r_min" else min(self.r_min, self.spacing / 2)
        return RadialGrid(r_min, self.r_max, 2 * self.points + 1, self.inner)


def _radial_levels(j: float, gamma: float, grid: RadialGrid, k: int, m: float) -> np.ndarray:
    r, h = grid.nodes(), grid.spacing
    diag = 1.0 / (m * h * h) + j * (j + 1) / (2 * m * r * r) - gamma / r
    off = np.full(len(r) - 1, -0.5 / (m * h * h))
    return sla.eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))[0]


@dataclass
class RadialResult:
    mu: float
    j: float
    gamma: float
    raw: list[float]  # energies on the input grid
    refined: list[float]  # on the half-spacing grid
    richardson: list[float]
    ratios: list[float]  # (E_h - E_h/2) / (E_h/2 - E_h/4)
    exact: list[float]  # -m gamma^2 / (2 (j + 1 + k)^2)


def radial_oracle(
    mu: float, gamma: float, j: float, grid: RadialGrid | None = None, k: int = 3, m: float = 1.0, check: bool = True
) -> RadialResult:
    """Lowest ``k`` eigenvalues of ``-u''/2m + [j(j+1)/(2 m r^2) - gamma/r] u``.

    Three grids with spacings ``h, h/2, h/4`` give a Richardson value
    ``(4 E_(h/2) - E_h) / 3`` and the convergence ratio; with ``check`` a
    ratio outside ``4 +- 0.5`` for a level raises :class:`GridTooCoarseError`.
    """
    mu_q = _half_integer(mu)
    if not gamma > 0:
        raise BoundSectorError("bound states need gamma > 0")
    jq = Fraction(round(2 * j), 2)
    if abs(2 * j - round(2 * j)) > 1e-12 or jq < abs(mu_q) or (jq - abs(mu_q)).denominator != 1:
        raise ValueError(f"j = {j!r} must be |mu| + integer")
    grid = grid or RadialGrid()
    levels = [j + 1 + i for i in range(k)]
    need = 3.0 * max(levels) ** 2 / (m * gamma)
    if grid.r_max <= need:
        raise ValueError(f"r_max = {grid.r_max} must exceed {need:g} for {k} levels")
    g1, g2 = grid, grid.refined()
    g3 = g2.refined()
    e1, e2, e3 = (_radial_levels(float(jq), gamma, g, k, m) for g in (g1, g2, g3))
    rich = (4 * e2 - e1) / 3
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = (e1 - e2) / (e2 - e3)
    if check:
        bad = [i for i, r in enumerate(ratios) if not (3.5 <= r <= 4.5)]
        if bad:
            raise GridTooCoarseError(f"levels {bad} do not converge as h^2 (ratios {ratios[bad]})")
    exact = [-m * gamma**2 / (2 * n**2) for n in levels]
    return RadialResult(float(mu_q), float(jq), gamma, e1.tolist(), e2.tolist(), rich.tolist(), ratios.tolist(), exact)


@dataclass
class CrossCheckEntry:
    n: str
    j: str
    table_energy: float
    oracle_raw: float
    oracle_richardson: float
    raw_error: float
    error: float
    ok: bool


@dataclass
class CrossCheck:
    mu: str
    gamma: float
    tolerance: float
    entries: list[CrossCheckEntry] = field(default_factory=list)
    degeneracy_ok: list[bool] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries) and all(self.degeneracy_ok)

    @property
    def mismatches(self) -> list[tuple[str, str]]:
        return [(e.n, e.j) for e in self.entries if not e.ok]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    CSV_COLUMNS = ("n", "j", "table_energy", "oracle_raw", "oracle_richardson", "error", "ok")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for e in self.entries:
            w.writerow(
                [e.n, e.j, f"{e.table_energy:.12g}", f"{e.oracle_raw:.12g}", f"{e.oracle_richardson:.12g}", f"{e.error:.12g}", e.ok]
            )
        return buf.getvalue()


def cross_check(
    table: LevelTable, grid: RadialGrid | None = None, tol: float = TOL.oracle, oracle: dict | None = None
) -> CrossCheck:
    """Compare every ``(n, j)`` of the table with the radial oracle.

    Energies of a fixed ``j`` come from one oracle solve: level ``n``
    is its ``(n - j - 1)``-th eigenvalue.  ``oracle`` may pass precomputed
    :class:`RadialResult` objects keyed by ``j`` (as a Fraction).
    """
    grid = grid or RadialGrid()
    out = CrossCheck(str(table.mu), table.gamma, tol)
    depth = {}
    for row in table.rows:
        for j in row.j_values:
            depth[j] = max(depth.get(j, 0), int(row.n - j))
    results = dict(oracle or {})
    for j, count in sorted(depth.items()):
        if j not in results or len(results[j].richardson) < count:
            results[j] = radial_oracle(float(table.mu), table.gamma, float(j), grid, k=count, m=table.m)
    for row in table.rows:
        for j in row.j_values:
            res = results[j]
            i = int(row.n - j - 1)
            E = row.energy
            err = abs(res.richardson[i] - E) / abs(E)
            raw = abs(res.raw[i] - E) / abs(E)
            out.entries.append(CrossCheckEntry(str(row.n), str(j), E, res.raw[i], res.richardson[i], raw, err, err <= tol))
        out.degeneracy_ok.append(sum(2 * j + 1 for j in row.j_values) == row.n**2 - table.mu**2)
    return out
