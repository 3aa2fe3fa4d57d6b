"""Command-line front end: ``fuzzydynsym verify|spectrum|symmetry|zwanziger|schema``.

Every command writes one report.  Reports are rendered with sorted keys
and 12 significant digits; the ``timing`` block is the only part that may
change between identical runs and is excluded from ``stability_hash``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
3 cache or file error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import TOL, ConfigError, RunConfig
from .fockrep import CacheError, CacheHashError, cache_read, cache_write
from .hamiltonians import ModelParams, NonConvergenceError, coulomb_hamiltonian, eigensolve
from .ncalg import ExpressionError, parse_statement, run_suite, verify_identity

REPORT_VERSION = "1.0"
CACHE_ENV = "FUZZYDYNSYM_CACHE"
LEVEL_TOLERANCES = (1e-3, 5e-3)  # relative error of levels n = 1, 2 against the closed form
PLATEAU = 1e-10  # errors below this count as converged when testing monotone decrease

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report plumbing


def _round(x):
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    return x


def check(name: str, passed: bool | None, value=None, tolerance=None, tag: str = "") -> dict:
    """One report line; ``passed=None`` records an informational value."""
    status = "info" if passed is None else ("pass" if passed else "fail")
    return {"name": name, "status": status, "value": value, "tolerance": tolerance, "tag": tag}


def canonical(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def stability_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("timing", "stability_hash")}
    return hashlib.sha256(canonical(body).encode("utf-8")).hexdigest()


def finish(command: str, cfg: RunConfig, checks: list[dict], data: dict, timing: dict) -> dict:
    failed = any(c["status"] == "fail" for c in checks)
    report = {
        "schema_version": REPORT_VERSION,
        "package_version": __version__,
        "command": command,
        "config": cfg.as_dict(),
        "checks": checks,
        "data": data,
        "status": "fail" if failed else "pass",
        "exit_code": EXIT_FAIL if failed else EXIT_OK,
    }
    report = _round(report)
    report["stability_hash"] = stability_hash(report)
    report["timing"] = _round(timing)
    return report


def report_schema() -> dict:
    """JSON schema of every report this CLI writes."""
    check_item = {
        "type": "object",
        "required": ["name", "status", "value", "tolerance", "tag"],
        "properties": {
            "name": {"type": "string"},
            "status": {"enum": ["pass", "fail", "info"]},
            "tolerance": {"type": ["number", "null"]},
            "tag": {"type": "string"},
        },
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": f"fuzzydynsym-report-{REPORT_VERSION}",
        "title": "fuzzydynsym report",
        "type": "object",
        "required": [
            "schema_version",
            "package_version",
            "command",
            "config",
            "checks",
            "data",
            "status",
            "exit_code",
            "stability_hash",
            "timing",
        ],
        "properties": {
            "schema_version": {"const": REPORT_VERSION},
            "package_version": {"type": "string"},
            "command": {"enum": ["verify", "spectrum", "symmetry", "zwanziger"]},
            "config": {"type": "object"},
            "checks": {"type": "array", "items": check_item},
            "data": {"type": "object"},
            "status": {"enum": ["pass", "fail"]},
            "exit_code": {"enum": [0, 1]},
            "stability_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
            "timing": {"type": "object"},
        },
        "additionalProperties": False,
    }


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# cache


def cache_dir(cfg: RunConfig, flag: str | None) -> Path | None:
    """Flag, then environment, then config file."""
    chosen = flag or os.environ.get(CACHE_ENV) or cfg.cache_dir
    return Path(chosen) if chosen else None


def hamiltonian_cached(params: ModelParams, directory: Path | None, timing: dict):
    """Coulomb Hamiltonian, read from or written to the cache directory."""
    if directory is None:
        timing["cache"] = "off"
        return coulomb_hamiltonian(params)
    key = f"H_lam{params.lam!r}_q{params.q!r}_n{params.n_max}_{params.basis.hash:016x}_v{__version__}.fzc"
    path = directory / key
    meta = {"code_version": __version__, "lam": params.lam, "q": params.q, "n_max": params.n_max}
    if path.exists():
        H = cache_read(path, expected_hash=params.basis.hash)
        stored = {k: H.masks.get(k) for k in meta}
        if stored != meta:
            raise CacheHashError(f"cache entry {path.name} was written for {stored}")
        timing["cache"] = "hit"
        return H
    H = coulomb_hamiltonian(params)
    cache_write(H.with_matrix(H.matrix), path, meta={"masks": meta})
    timing["cache"] = "write"
    return H


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: RunConfig, exprs: list[str], timing: dict) -> tuple[list[dict], dict, list]:
    checks, rows = [], []
    for rep in run_suite():
        checks.append(check(rep.name, rep.passed, str(rep.difference), 0, rep.tag))
        rows.append([rep.name, rep.tag, "pass" if rep.passed else "fail", str(rep.difference)])
    for text in exprs:
        try:
            lhs, rhs = parse_statement(text)
        except ExpressionError as exc:
            raise UsageError(f"cannot parse {text!r}: {exc}") from None
        rep = verify_identity(lhs, rhs, name=text, tag="user")
        checks.append(check(text, rep.passed, str(rep.difference), 0, "user"))
        rows.append([text, "user", "pass" if rep.passed else "fail", str(rep.difference)])
    data = {"identities": len(rows)}
    return checks, data, [["name", "tag", "status", "difference"], rows]


def _solve_levels(params: ModelParams, cfg: RunConfig, directory, timing: dict, k: int):
    from .symmetry import energy_formula

    H = hamiltonian_cached(params, directory, timing)
    sol = eigensolve(H, k=k, residual_tol=cfg.residual_tol, cluster_tol=cfg.cluster_tol)
    clusters = []
    for cl in sol.clusters:
        E = float(np.mean(sol.values[cl]))
        rec = {"energy": E, "multiplicity": len(cl), "residual": float(np.max(sol.residuals[cl]))}
        if E < 0 and params.q > 0:
            # nearest closed-form level
            n = min(range(1, 200), key=lambda m: abs(energy_formula(m, params.lam, params.q) - E))
            ref = energy_formula(n, params.lam, params.q)
            rec.update(n=n, formula=ref, relative_error=abs(E - ref) / abs(ref))
        clusters.append(rec)
    return sol, clusters


def _level_error(clusters: list[dict], n: int) -> float | None:
    errs = [c["relative_error"] for c in clusters if c.get("n") == n]
    return min(errs) if errs else None


def cmd_spectrum(cfg: RunConfig, directory, timing: dict, k: int = 10):
    from .symmetry import energy_formula

    checks, data = [], {}
    ladder = list(cfg.ladder) if cfg.sweep else [cfg.n_max]
    if cfg.sweep and not ladder:
        ladder = [20, 30, 40]
    table = []
    for n_max in ladder:
        params = ModelParams(cfg.lam, cfg.q, n_max)
        t0 = time.perf_counter()
        try:
            sol, clusters = _solve_levels(params, cfg, directory, timing, k)
        except NonConvergenceError as exc:
            checks.append(check(f"eigensolve n_max={n_max}", False, max(exc.diagnostics["residuals"]), cfg.residual_tol))
            continue
        timing[f"solve_n{n_max}_s"] = time.perf_counter() - t0
        data[f"n_max={n_max}"] = {"eigenvalues": sol.values.tolist(), "clusters": clusters}
        table.append([n_max, _level_error(clusters, 1), _level_error(clusters, 2)])
        if cfg.q > 0:
            for n, tol in zip((1, 2), LEVEL_TOLERANCES):
                err = _level_error(clusters, n)
                checks.append(check(f"level n={n} vs closed form, n_max={n_max}", None, err, tol, "spectrum"))
        else:
            lowest = float(sol.values[0])
            checks.append(check(f"no bound states at q<=0, n_max={n_max}", lowest >= -TOL.hermitian, lowest, -TOL.hermitian))
    if cfg.q > 0 and table:
        last = table[-1]
        for n, tol, err in zip((1, 2), LEVEL_TOLERANCES, last[1:]):
            checks.append(check(f"level n={n} at plateau (n_max={last[0]})", err is not None and err <= tol, err, tol, "spectrum"))
        if len(table) > 1:
            for col, n in ((1, 1), (2, 2)):
                errs = [row[col] for row in table]
                ok = all(e is not None for e in errs) and all(
                    b <= a or max(a, b) <= PLATEAU for a, b in zip(errs, errs[1:])
                )
                checks.append(check(f"level n={n} error decreases over the ladder", ok, errs[-1], PLATEAU, "spectrum"))
        data["formula"] = {str(n): energy_formula(n, cfg.lam, cfg.q) for n in (1, 2, 3)}
    data["convergence"] = [{"n_max": r[0], "error_n1": r[1], "error_n2": r[2]} for r in table]
    return checks, data, [["n_max", "error_n1", "error_n2"], table]


def cmd_symmetry(cfg: RunConfig, timing: dict):
    from .symmetry import hydrogen_limit_study, symmetry_report

    params = ModelParams(cfg.lam, cfg.q, cfg.n_max)
    rep = symmetry_report(params, k=8, box_sigma=1.0 / cfg.lam**2 if cfg.q != 0 else None)
    checks = []
    for k, r in enumerate(rep.conservation, start=1):
        checks.append(check(f"[A{k}, H] interior residual", r <= TOL.conservation, r, TOL.conservation, "conservation"))
    for c in rep.clusters:
        label = f"cluster E={c.energy:.9g} ({c.regime}, ell={c.ell})"
        converged = c.boundary_weight <= 1e-6
        if c.regime == "SO4" and c.energy < 0 and converged:
            checks.append(check(f"{label} Lenz commutator", c.commutator_residual <= TOL.algebra, c.commutator_residual, TOL.algebra, "lenz"))
            checks.append(check(f"{label} |C1|", abs(c.C1) <= TOL.algebra, c.C1, TOL.algebra, "casimir"))
            dev = abs(c.C2_prime - cfg.q**2) / cfg.q**2
            checks.append(check(f"{label} C2' vs q^2", dev <= TOL.casimir, c.C2_prime, TOL.casimir, "casimir"))
            checks.append(check(f"{label} C2 rounding", c.n_error <= TOL.casimir, c.n_error, TOL.casimir, "casimir"))
        elif c.regime == "SO31" and c.interior_fitted_coefficient is not None:
            checks.append(check(f"{label} fitted coefficient negative", c.interior_fitted_coefficient < 0, c.interior_fitted_coefficient, 0, "so31"))
            checks.append(check(f"{label} SO(3,1) closure (interior)", c.interior_residual <= TOL.casimir, c.interior_residual, TOL.casimir, "so31"))
            checks.append(check(f"{label} closure, full projector", None, c.commutator_residual, None, "so31"))
        else:
            checks.append(check(f"{label} Lenz commutator", None, c.commutator_residual, None, "lenz"))
    data = rep.as_dict()
    rows = [[c.energy, c.regime, c.dimension, c.commutator_residual, c.interior_residual, c.C2] for c in rep.clusters]
    header = ["energy", "regime", "dimension", "residual", "interior_residual", "C2"]
    if cfg.sweep:
        study = hydrogen_limit_study(cfg.q, 1)
        data["hydrogen_limit"] = {
            "rows": [vars(r) for r in study.rows],
            "slope": study.slope,
            "numeric_slope": study.numeric_slope,
            "extrapolated": study.extrapolated,
            "limit": study.limit,
        }
        checks.append(check("hydrogen limit lambda power", abs(study.numeric_slope - 2) <= 0.1, study.numeric_slope, 0.1, "limit"))
        header = ["lam", "formula", "numeric", "deviation"]
        rows = [[r.lam, r.formula, r.numeric, r.deviation] for r in study.rows]
    return checks, data, [header, rows]


def cmd_zwanziger(cfg: RunConfig, args) -> tuple[list[dict], dict, list]:
    from . import zwanziger as zw

    sub = args.sub
    checks, data = [], {}
    if sub in ("levels", "oracle", "cross") and not zw.dirac_check(cfg.mu):
        raise UsageError(f"mu = {cfg.mu} violates the Dirac condition")
    if sub in ("levels", "oracle", "cross") and not cfg.gamma > 0:
        raise UsageError("bound states need gamma > 0")
    grid = zw.RadialGrid(cfg.r_min, cfg.r_max, cfg.grid_points)
    if sub in ("levels", "cross"):
        table = zw.level_table(cfg.mu, cfg.gamma, cfg.k)
        data["levels"] = table.as_dict()
        for row in table.rows:
            checks.append(check(f"row n={row.n} identities", row.identities_hold(table.mu), row.degeneracy, 0, "levels"))
        header = list(zw.LevelTable.CSV_COLUMNS)
        rows = [list(r) for r in csv.reader(io.StringIO(table.to_csv()))][1:]
        if sub == "cross" or args.oracle:
            cc = zw.cross_check(table, grid, cfg.oracle_tol)
            data["cross_check"] = cc.as_dict()
            for e in cc.entries:
                checks.append(check(f"oracle n={e.n} j={e.j}", e.ok, e.error, cfg.oracle_tol, "oracle"))
            header = list(zw.CrossCheck.CSV_COLUMNS)
            rows = [list(r) for r in csv.reader(io.StringIO(cc.to_csv()))][1:]
        return checks, data, [header, rows]
    if sub == "oracle":
        res = zw.radial_oracle(cfg.mu, cfg.gamma, cfg.j, grid, k=cfg.k)
        data["oracle"] = vars(res)
        rows = []
        for i, (raw, rich, exact) in enumerate(zip(res.raw, res.richardson, res.exact)):
            err = abs(rich - exact) / abs(exact)
            checks.append(check(f"oracle level {i} j={cfg.j}", err <= cfg.oracle_tol, err, cfg.oracle_tol, "oracle"))
            rows.append([i, raw, rich, exact, err])
        return checks, data, [["k", "raw", "richardson", "exact", "error"], rows]
    if sub == "fields":
        if not args.points:
            raise UsageError("fields needs --points FILE.csv")
        pts = zw.read_points(args.points)
        B = zw.monopole_field(args.g, pts)
        rows = [[*p, *b, float(np.linalg.norm(b))] for p, b in zip(pts.tolist(), B.tolist())]
        data["points"] = len(rows)
        data["flux_unit_sphere"] = zw.flux(args.g)
        checks.append(check("flux through the unit sphere", abs(data["flux_unit_sphere"] - args.g) <= 1e-6 * max(1, abs(args.g)), data["flux_unit_sphere"], 1e-6, "fields"))
        if len(pts):
            try:
                cc = zw.curl_check(args.g, pts)
                checks.append(check("curl A = B at the given points", cc.max_error <= TOL.oracle, cc.max_error, TOL.oracle, "fields"))
            except zw.StringProximityError as exc:
                raise UsageError(str(exc)) from None
        data["field"] = rows
        return checks, data, [["x", "y", "z", "Bx", "By", "Bz", "B"], rows]
    if sub == "reduce":
        red = zw.reduce_two_body(zw.DyonSystem(args.e1, args.e2, args.g1, args.g2, args.m1, args.m2))
        data["reduced"] = vars(red)
        checks.append(check("Dirac condition", zw.dirac_check(red.mu), red.mu, TOL.dirac, "reduce"))
        return checks, data, [["m", "mu", "gamma"], [[red.m, red.mu, red.gamma]]]
    raise UsageError(f"unknown zwanziger subcommand {sub!r}")


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file; flags override it")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--cache-dir", help=f"cache directory (default: ${CACHE_ENV}, then the config file)")
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--lambda", dest="lam", type=float)
    model.add_argument("--q", type=float)
    model.add_argument("--nmax", dest="n_max", type=int)
    model.add_argument("--sweep", action="store_true", default=None, help="n_max ladder (spectrum) or lambda sweep (symmetry)")
    model.add_argument("--ladder", type=lambda s: tuple(int(x) for x in s.split(",")), help="n_max ladder, e.g. 20,30,40")
    dyon = argparse.ArgumentParser(add_help=False)
    dyon.add_argument("--mu", type=float)
    dyon.add_argument("--gamma", type=float)
    dyon.add_argument("--j", type=float)
    dyon.add_argument("-k", dest="k", type=int)
    dyon.add_argument("--grid-points", dest="grid_points", type=int)
    dyon.add_argument("--rmin", dest="r_min", type=float)
    dyon.add_argument("--rmax", dest="r_max", type=float)

    p = argparse.ArgumentParser(prog="fuzzydynsym", description="Fuzzy-space Coulomb and dyon verification toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="exact symbolic identity suite")
    v.add_argument("--expr", action="append", default=[], help="extra statement, e.g. 'comm(x(1),x(2)) == 2*i*lam*x(3)'")
    v.add_argument("exprs", nargs="*", help="extra statements")
    sub.add_parser("spectrum", parents=[common, model], help="Coulomb spectrum against the closed form")
    sub.add_parser("symmetry", parents=[common, model], help="Lenz vector, Casimirs and regimes")
    z = sub.add_parser("zwanziger", parents=[common, dyon], help="charge-dyon levels, oracle and fields")
    z.add_argument("sub", choices=("levels", "oracle", "cross", "fields", "reduce"))
    z.add_argument("--oracle", action="store_true", help="with levels: cross-check against the radial oracle")
    z.add_argument("--g", type=float, default=4 * math.pi, help="magnetic charge for fields")
    z.add_argument("--points", help="CSV file with header x,y,z")
    for name in ("e1", "e2", "g1", "g2"):
        z.add_argument(f"--{name}", type=float, default=0.0)
    for name in ("m1", "m2"):
        z.add_argument(f"--{name}", type=float, default=1.0)
    sub.add_parser("schema", help="print the report JSON schema")
    return p


CONFIG_FLAGS = ("lam", "q", "n_max", "mu", "gamma", "j", "k", "grid_points", "r_min", "r_max", "format", "output", "sweep", "ladder")


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    for name in CONFIG_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    if args.command == "schema":
        sys.stdout.write(json.dumps(report_schema(), sort_keys=True, indent=2) + "\n")
        return EXIT_OK
    started = time.perf_counter()
    timing = {"started": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    try:
        cfg = resolve_config(args)
        if args.command == "verify":
            checks, data, table = cmd_verify(cfg, [*args.expr, *args.exprs], timing)
        elif args.command == "spectrum":
            checks, data, table = cmd_spectrum(cfg, cache_dir(cfg, args.cache_dir), timing)
        elif args.command == "symmetry":
            checks, data, table = cmd_symmetry(cfg, timing)
        else:
            checks, data, table = cmd_zwanziger(cfg, args)
    except (ConfigError, UsageError, ValueError) as exc:
        print(f"fuzzydynsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheError, OSError) as exc:
        print(f"fuzzydynsym: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    timing["wall_clock_s"] = time.perf_counter() - started
    report = finish(args.command, cfg, checks, data, timing)
    try:
        if cfg.format == "csv":
            _emit(_csv(*table), cfg.output or None)
        else:
            _emit(canonical(report), cfg.output or None)
    except OSError as exc:
        print(f"fuzzydynsym: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
