"""Command-line front end.

    qdarboux solve-linear JOB.json [overrides]
    qdarboux backlund     JOB.json [overrides]
    qdarboux verify       JOB.json [overrides]

A job is a JSON object (see ``README.md``); flags override its fields.  Tables
go to stdout, diagnostics to stderr.  Exit codes: 0 ok, 2 configuration or
parse error, 3 numerical domain error, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import backlund as bl
from . import classic
from .darboux import riccati_minus_fn, riccati_plus_fn
from .errors import (
    DomainError,
    NonConvergedError,
    ParseError,
    QDarbouxError,
    SeedValidationError,
    UnboundParameterError,
)
from .exprdsl import Expr, parse, sample
from .linsys import PotentialQuad, closed_form_V0_stack, propagate, system_residual
from .qlattice import LatticeFn, QGrid, depth_for_tail, recommended_dps

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4
AUTO_MP_DEPTH = 4096


class ConfigError(Exception):
    """Invalid job description."""


@dataclass
class JobConfig:
    command: str
    base: float = 1.0
    q: float = 0.5
    depth: Any = 256
    dps: Any = "auto"
    R: str = "0"
    S: str = "0"
    T: str = "0"
    V: str | None = None
    seed: str | None = None
    params: dict = field(default_factory=dict)
    initial: tuple = (1.0, 0.0)
    t: list = field(default_factory=lambda: [0.0])
    mode: str = "plus"
    format: str = "csv"
    tolerance: float = 1e-8
    seed_tolerance: float = 1e-9
    group_law: bool = False
    classic: bool = False
    h: float = 1e-4
    x: list | None = None

    # -- derived objects -----------------------------------------------------------

    def bindings(self) -> dict:
        out = {k: float(v) for k, v in self.params.items()}
        out.setdefault("q", float(self.q))
        return out

    def expr(self, name) -> Expr:
        src = getattr(self, name)
        try:
            return parse(str(src))
        except ParseError as exc:
            raise ConfigError(f"{name}: {exc}") from None

    def grid(self) -> QGrid:
        """The lattice for this job.

        ``dps = "auto"`` (the default) uses multiprecision with
        :func:`recommended_dps` digits on lattices of depth up to
        ``AUTO_MP_DEPTH`` and float64 beyond; ``dps = 0`` forces float64.
        """
        if self.q == 1:
            raise ConfigError("q = 1 is the differential limit; rerun with --classic")
        try:
            depth = depth_for_tail(self.base, self.q, 1e-13) if self.depth == "auto" else int(self.depth)
            dps = self.dps
            if dps == "auto":
                dps = recommended_dps(self.base, self.q, depth) if depth <= AUTO_MP_DEPTH else None
            return QGrid(float(self.base), float(self.q), depth, dps=int(dps) if dps else None)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}") from None

    def potentials(self, grid: QGrid, with_V=True) -> PotentialQuad:
        b = self.bindings()
        fns = [sample(self.expr(n), grid, b) for n in "RST"]
        V = sample(self.expr("V"), grid, b) if with_V and self.V is not None else LatticeFn.constant(grid, 0.0)
        return PotentialQuad(*fns, V)

    def seed_solution(self, grid: QGrid) -> bl.SeedSolution:
        if self.seed is None:
            raise ConfigError("this command needs a seed expression 'seed'")
        u0 = sample(self.expr("seed"), grid, self.bindings())
        if self.V is None:
            return bl.SeedSolution.from_u(u0, self.potentials(grid, with_V=False))
        return bl.SeedSolution(u0, self.potentials(grid), tol=self.seed_tolerance)


_FIELDS = set(JobConfig.__dataclass_fields__)


def load_config(command: str, path: str | None, args: argparse.Namespace) -> JobConfig:
    raw: dict = {}
    if path:
        try:
            text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
            raw = json.loads(text)
        except OSError as exc:
            raise ConfigError(f"cannot read job file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"job file is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("job file must hold a JSON object")
    raw = dict(raw)
    grid = raw.pop("grid", {}) or {}
    if not isinstance(grid, dict):
        raise ConfigError("'grid' must be an object")
    raw.update({k: v for k, v in grid.items()})
    pots = raw.pop("potentials", {}) or {}
    raw.update(pots)
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown job field(s): {', '.join(sorted(unknown))}")
    overrides = {
        "base": args.grid_base, "q": args.grid_q, "depth": args.grid_depth, "dps": args.dps,
        "t": args.t, "format": args.format, "tolerance": args.tolerance, "mode": args.mode,
        "seed": args.seed, "h": args.h, "R": args.R, "S": args.S, "T": args.T, "V": args.V,
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    if args.group_law:
        raw["group_law"] = True
    if args.classic:
        raw["classic"] = True
    for binding in args.param or []:
        name, _, value = binding.partition("=")
        try:
            raw.setdefault("params", {})
            raw["params"] = {**raw["params"], name.strip(): float(value)}
        except ValueError:
            raise ConfigError(f"bad --param {binding!r}; expected NAME=VALUE") from None
    cfg = JobConfig(command=command, **raw)
    if not isinstance(cfg.t, list):
        cfg.t = [cfg.t]
    try:
        cfg.t = [float(v) for v in cfg.t]
        cfg.initial = tuple(float(v) for v in cfg.initial)
        cfg.q, cfg.base = float(cfg.q), float(cfg.base)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"non-numeric value: {exc}") from None
    if cfg.depth != "auto" and not (isinstance(cfg.depth, (int, float)) and float(cfg.depth).is_integer()):
        raise ConfigError(f"grid depth must be a positive integer or 'auto', got {cfg.depth!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.mode not in ("plus", "minus", "chain"):
        raise ConfigError(f"mode must be plus, minus or chain, got {cfg.mode!r}")
    if len(cfg.initial) != 2:
        raise ConfigError("'initial' must be [psi0, phi0]")
    if cfg.q == 1 and not cfg.classic:
        raise ConfigError("q = 1 is the differential limit; rerun with --classic")
    return cfg


# -- output ---------------------------------------------------------------------

def _num(v):
    if v is None:
        return None
    f = float(v)
    return f if math.isfinite(f) else None


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return "%.17g" % float(v)


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.summary: dict = {}

    def add(self, row):
        self.rows.append([_num(v) if not isinstance(v, (bool, np.bool_)) else bool(v) for v in row])

    def render(self, fmt: str) -> str:
        if fmt == "json":
            body = {"columns": self.columns, "rows": self.rows, "summary": self.summary}
            return json.dumps(body, indent=1, sort_keys=True) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _col(fn: LatticeFn | np.ndarray | None, n):
    if fn is None:
        return [None] * n
    vals = fn.values if isinstance(fn, LatticeFn) else fn
    vals = [float(v) for v in vals]
    return vals + [None] * (n - len(vals))


def _sup(values) -> float:
    arr = np.abs(np.asarray([float(v) for v in values], dtype=float))
    return float(arr.max()) if arr.size else 0.0


# -- commands -------------------------------------------------------------------

def cmd_solve_linear(cfg: JobConfig) -> tuple[Table, int]:
    g = cfg.grid()
    p = cfg.potentials(g)
    sol = propagate(p, cfg.initial)
    r1, r2 = system_residual(p, sol)
    n = g.depth + 1
    u = np.full(n, np.nan)
    psi_f, phi_f = sol.psi.to_float(), sol.phi.to_float()
    nz = psi_f != 0
    u[nz] = phi_f[nz] / psi_f[nz]
    cols = ["x", "psi", "phi", "u", "residual_psi", "residual_phi"]
    oracle = None
    if np.all(p.V.values == 0):
        lam = closed_form_V0_stack(p)
        end = np.array([sol.psi.values[-1], sol.phi.values[-1]])
        vec = np.stack([sol.psi.values, sol.phi.values], axis=1)
        pred = np.einsum("nij,nj->ni", lam, vec)
        oracle = np.max(np.abs((pred - end).astype(float)), axis=1)
        cols.append("closed_form_delta")
    t = Table(cols)
    xs, res1, res2 = _col(g.points, n), _col(r1, n), _col(r2, n)
    for i in range(n):
        row = [xs[i], psi_f[i], phi_f[i], u[i] if np.isfinite(u[i]) else None, res1[i], res2[i]]
        if oracle is not None:
            row.append(oracle[i])
        t.add(row)
    t.summary = {"max_residual": max(_sup(r1.values), _sup(r2.values))}
    if oracle is not None:
        t.summary["closed_form_max_delta"] = float(oracle.max())
    return t, EXIT_OK


def _marked(seed: bl.SeedSolution, t: float, minus: bool):
    """Backlund image with pole rows flagged instead of raising."""
    u0 = -seed.u0 if minus else seed.u0
    num, den = bl.backlund_terms(u0, seed.potentials, t)
    den_f = np.asarray([float(v) for v in den])
    pole = den_f == 0
    pole[:-1] |= np.sign(den_f[:-1]) != np.sign(den_f[1:])
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = u0.values + num / den
    u = LatticeFn(seed.grid, -vals if minus else vals)
    return u, pole


def cmd_backlund(cfg: JobConfig) -> tuple[Table, int]:
    if cfg.classic:
        return _classic_backlund(cfg)
    g = cfg.grid()
    seed = cfg.seed_solution(g)
    p = seed.potentials
    n = g.depth + 1
    xs = _col(g.points, n)
    R0 = riccati_minus_fn(seed.u0, p)
    if cfg.mode == "chain":
        chain = bl.DeformationChain(seed, cfg.t)
        stages = bl.chain_stages(chain) if cfg.t else []
        u = stages[-1] if stages else seed.u0
        V_after = riccati_plus_fn(u, p)
        prev = riccati_plus_fn(stages[-2], p) if len(stages) > 1 else R0
        res_plus = None
        res_minus = riccati_minus_fn(u, p) - prev if cfg.t else None
        t = Table(["x", "u0", "u", "V_before", "V_after", "residual_minus"])
        cols = [xs, _col(seed.u0, n), _col(u, n), _col(seed.V, n), _col(V_after, n), _col(res_minus, n)]
        for row in zip(*cols):
            t.add(row)
        t.summary = {"params": cfg.t, "max_residual_minus": _sup(res_minus.values) if res_minus else 0.0}
        return t, EXIT_OK

    minus = cfg.mode == "minus"
    images, poles = [], np.zeros(n, dtype=bool)
    for tv in cfg.t:
        u, pole = _marked(seed, tv, minus) if tv != 0 else (seed.u0, np.zeros(n, dtype=bool))
        images.append(u)
        poles |= pole
    if poles.any():
        print(f"warning: movable pole(s) at lattice rows {np.flatnonzero(poles).tolist()}", file=sys.stderr)
    multi = len(cfg.t) > 1
    names = [f"u_{k + 1}" for k in range(len(cfg.t))] if multi else ["u"]
    cols = ["x", "u0", *names, "V_before", "V_after", "residual"]
    if minus:
        cols.append("residual_minus")
    if len(cfg.t) == 4:
        cols += ["cross_ratio", "cross_ratio_target"]
    cols.append("pole")
    tab = Table(cols)
    residuals, extras = [], []
    V_after = seed.V
    if minus and len(cfg.t) == 1:
        V_after = bl.deformed_potential_once(seed, cfg.t[0]) if seed.is_schrodinger() else riccati_plus_fn(images[0], p)
    for u in images:
        target = V_after if (minus and not multi) else (seed.V if not minus else riccati_plus_fn(u, p))
        residuals.append(riccati_plus_fn(u, p) - target)
        if minus:
            extras.append(riccati_minus_fn(u, p) - R0)
    res = np.max(np.abs(np.array([[float(v) for v in r.values] for r in residuals])), axis=0)
    res_m = (np.max(np.abs(np.array([[float(v) for v in r.values] for r in extras])), axis=0) if minus else None)
    cr = target_cr = None
    if len(cfg.t) == 4:
        vals = [np.asarray([float(v) for v in u.values]) for u in images]
        with np.errstate(divide="ignore", invalid="ignore"):
            cr = ((vals[3] - vals[2]) * (vals[0] - vals[1])) / ((vals[2] - vals[0]) * (vals[1] - vals[3]))
        t1, t2, t3, t4 = cfg.t
        try:
            target_cr = bl.cross_ratio(t1, t2, t3, t4)
        except DomainError:
            target_cr = None
    base_cols = [xs, _col(seed.u0, n), *[_col(u, n) for u in images], _col(seed.V, n), _col(V_after, n), _col(res, n)]
    if minus:
        base_cols.append(_col(res_m, n))
    if cr is not None:
        base_cols += [_col(cr, n), [target_cr] * n]
    for i, row in enumerate(zip(*base_cols)):
        row = [None if (poles[i] and v is not None and not math.isfinite(v)) else v for v in row]
        tab.add([*row, bool(poles[i])])
    finite = res[np.isfinite(res) & ~poles[: len(res)]]
    tab.summary = {"t": cfg.t, "max_residual": float(finite.max()) if finite.size else 0.0, "poles": int(poles.sum())}
    if cr is not None:
        ok = np.isfinite(cr)
        tab.summary["cross_ratio_target"] = target_cr
        if target_cr is not None and ok.any():
            tab.summary["cross_ratio_max_deviation"] = float(np.max(np.abs(cr[ok] - target_cr)))
    code = EXIT_OK
    if cfg.group_law:
        ts = cfg.t if len(cfg.t) == 2 else [cfg.t[0] / 2, cfg.t[0] / 2]
        err = _group_law_error(seed, ts[0], ts[1])
        tab.summary["group_law_error"] = err
        tab.summary["group_law_passed"] = err < cfg.tolerance
        if not err < cfg.tolerance:
            print(f"group law check failed: {err:.3e} >= {cfg.tolerance:.1e}", file=sys.stderr)
            code = EXIT_VERIFY
    return tab, code


def _group_law_error(seed: bl.SeedSolution, t1, t2) -> float:
    inner = bl.SeedSolution(bl.backlund_plus(seed, t2), seed.potentials, tol=None)
    lhs = bl.backlund_plus(inner, t1)
    rhs = bl.backlund_plus(seed, t1 + t2)
    return _sup((lhs - rhs).values)


def _classic_points(cfg: JobConfig) -> np.ndarray:
    if cfg.x is not None:
        return np.asarray(cfg.x, dtype=float)
    return np.linspace(0.1, float(cfg.base), 10)


def _classic_backlund(cfg: JobConfig) -> tuple[Table, int]:
    if cfg.seed is None:
        raise ConfigError("this command needs a seed expression 'seed'")
    xs = _classic_points(cfg)
    b = {k: float(v) for k, v in cfg.params.items()}
    V = cfg.V if cfg.V is not None else "0"
    p = classic.ClassicalPotentials(cfg.R, cfg.S, cfg.T, V, params=b, h=cfg.h, x_max=float(xs.max()))
    u0 = cfg.expr("seed")
    t_ = cfg.t[0]
    base = p.fn(u0)(xs)
    if cfg.mode == "minus":
        return _classic_minus(cfg, p, u0, xs)
    u = classic.classical_backlund(u0, p, t_, xs)
    res = classic.backlund_residual(u0, p, t_, xs)
    V_col = p.fn(V)(xs)
    if cfg.V is None:
        # V defined by the seed itself: u0' + (R - T) u0 + S u0**2
        V_col = classic.riccati_residual(p.fn(u0), p, xs)
        res = res - V_col
    tab = Table(["x", "u0", "u", "V", "residual"])
    for row in zip(xs, base, u, V_col, res):
        tab.add(row)
    tab.summary = {"t": t_, "classic": True, "max_residual": _sup(res)}
    return tab, EXIT_OK


def _classic_minus(cfg, p, u0, xs) -> tuple[Table, int]:
    if not (np.all(p.fn(p.R)(xs) == 0) and np.all(p.fn(p.S)(xs) == 1) and np.all(p.fn(p.T)(xs) == 0)):
        raise ConfigError("classic minus mode needs R = 0, S = 1, T = 0")
    t_, h, b = cfg.t[0], cfg.h, p.params
    x_max = float(xs.max()) + 12 * h

    def u_t(y):
        return classic.classical_deformed_solution(u0, t_, y, h=h, params=b, x_max=x_max)

    Va = classic.classical_deformed_potential(u0, t_, xs, h=h, params=b, v0=cfg.V, x_max=x_max)
    sch = classic.ClassicalPotentials.schrodinger(params=b, h=h, x_max=x_max)
    uf = sch.fn(u0)
    Vb = sch.fn(cfg.V)(xs) if cfg.V is not None else classic.riccati_residual(uf, sch, xs)
    d = 10 * h  # outer difference step, coarser than the inner one (span padded above)
    plus = classic.riccati_residual(u_t, sch, xs, delta=d) - Va
    ut, u0x = u_t(xs), uf(xs)
    minus = (-(u_t(xs + d) - u_t(xs - d)) / (2 * d) + ut * ut) - (-(uf(xs + d) - uf(xs - d)) / (2 * d) + u0x * u0x)
    tab = Table(["x", "u0", "u", "V_before", "V_after", "residual", "residual_minus"])
    for row in zip(xs, u0x, ut, Vb, Va, plus, minus):
        tab.add(row)
    tab.summary = {"t": t_, "classic": True, "max_residual": max(_sup(plus), _sup(minus))}
    return tab, EXIT_OK


# -- verify ---------------------------------------------------------------------

def _check(report, name, fn, tol):
    try:
        value = float(fn())
        passed = bool(value < tol)
        report.append({"name": name, "passed": passed, "max_residual": value, "tolerance": tol})
    except QDarbouxError as exc:
        report.append({"name": name, "passed": False, "error": str(exc), "tolerance": tol})


def cmd_verify(cfg: JobConfig) -> tuple[dict, int]:
    g = cfg.grid()
    tol = cfg.tolerance
    report: list[dict] = []
    try:
        seed = cfg.seed_solution(g)
        report.append({"name": "seed_validation", "passed": True, "tolerance": cfg.seed_tolerance,
                       "max_residual": _sup(seed.residual().values)})
    except SeedValidationError as exc:
        report.append({"name": "seed_validation", "passed": False, "error": str(exc),
                       "max_residual": float(exc.residual), "index": exc.index, "tolerance": cfg.seed_tolerance})
        return _verdict(report, g), EXIT_VERIFY
    p = seed.potentials
    ts = [v for v in cfg.t if v != 0] or [0.5]

    def closure():
        return max(_sup((riccati_plus_fn(bl.backlund_plus(seed, tv), p) - seed.V).values) for tv in ts)

    _check(report, "auto_backlund_closure", closure, tol)
    _check(report, "group_law", lambda: _group_law_error(seed, ts[0], ts[0] / 2), tol)

    def general():
        sol = bl.general_solution(seed, 1.0, ts[0])
        r1, r2 = system_residual(p, sol)
        return max(_sup(r1.values), _sup(r2.values))

    _check(report, "general_solution_residual", general, tol)

    def cross():
        params = (0.0, 0.3, 0.7, 1.0)
        us = [bl.backlund_plus(seed, tv) for tv in params]
        target = bl.cross_ratio(*params)
        vals = [np.asarray([float(v) for v in u.values]) for u in us]
        d1, d2 = vals[2] - vals[0], vals[1] - vals[3]
        ok = (np.abs(d1) > 1e-6) & (np.abs(d2) > 1e-6)
        cr = ((vals[3] - vals[2]) * (vals[0] - vals[1]))[ok] / (d1 * d2)[ok]
        return float(np.max(np.abs(cr - target))) if cr.size else 0.0

    _check(report, "cross_ratio", cross, tol)
    if seed.is_schrodinger():
        R0 = riccati_minus_fn(seed.u0, p)

        def deformation():
            worst = 0.0
            for tv in ts:
                u = bl.backlund_minus(seed, tv)
                Vt = bl.deformed_potential_once(seed, tv)
                worst = max(worst, _sup((riccati_plus_fn(u, p) - Vt).values), _sup((riccati_minus_fn(u, p) - R0).values))
            return worst

        def reconstruct():
            worst = 0.0
            for tv in ts:
                u = bl.backlund_minus(seed, tv)
                Vt = bl.deformed_potential_once(seed, tv)
                hi, lo = bl.quadratic_reconstruct_fn(Vt, R0)
                n = len(hi)
                uu = u.values[:n]
                err = np.minimum(np.abs((hi - uu).astype(float)), np.abs((lo - uu).astype(float)))
                worst = max(worst, float(err.max()))
            return worst

        _check(report, "deformation_consistency", deformation, tol)
        _check(report, "quadratic_reconstruction", reconstruct, max(tol, 1e-7))
    verdict = _verdict(report, g)
    return verdict, EXIT_OK if verdict["passed"] else EXIT_VERIFY


def _verdict(report, g: QGrid) -> dict:
    return {
        "passed": all(c["passed"] for c in report),
        "checks": report,
        "grid": {"base": g.base, "q": g.q, "depth": g.depth, "dps": g.dps},
    }


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdarboux", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("solve-linear", "propagate the linear system and tabulate psi, phi, u"),
        ("backlund", "apply Backlund maps or deformation chains to a seed"),
        ("verify", "run the invariant checks on a configured problem"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", nargs="?", help="JSON job file ('-' for stdin)")
        sp.add_argument("--grid-base", type=float)
        sp.add_argument("--grid-q", type=float)
        sp.add_argument("--grid-depth", type=lambda s: s if s == "auto" else int(s))
        sp.add_argument("--dps", type=lambda s: s if s == "auto" else int(s),
                        help="decimal digits for a multiprecision lattice ('auto' default, 0 for float64)")
        sp.add_argument("--t", type=lambda s: [float(v) for v in s.split(",")],
                        help="group parameter(s), comma separated")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--tolerance", type=float)
        sp.add_argument("--mode", choices=["plus", "minus", "chain"])
        sp.add_argument("--seed")
        for c in "RSTV":
            sp.add_argument(f"--{c}", dest=c)
        sp.add_argument("--param", action="append", metavar="NAME=VALUE")
        sp.add_argument("--h", type=float, help="quadrature step for --classic")
        sp.add_argument("--group-law", action="store_true")
        sp.add_argument("--classic", action="store_true", help="use the q -> 1 differential formulas")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.command, args.config, args)
        if cfg.command == "verify":
            if cfg.classic:
                raise ConfigError("verify runs on q-lattices only")
            report, code = cmd_verify(cfg)
            sys.stdout.write(json.dumps(report, indent=1, sort_keys=True) + "\n")
            return code
        if cfg.command == "solve-linear" and cfg.classic:
            raise ConfigError("solve-linear runs on q-lattices only")
        run = cmd_solve_linear if cfg.command == "solve-linear" else cmd_backlund
        table, code = run(cfg)
        sys.stdout.write(table.render(cfg.format))
        if cfg.format == "csv" and table.summary:
            print(json.dumps(table.summary, sort_keys=True), file=sys.stderr)
        return code
    except (DomainError, NonConvergedError, SeedValidationError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParseError, UnboundParameterError, TypeError, ValueError) as exc:
        msg = exc if not isinstance(exc, UnboundParameterError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
