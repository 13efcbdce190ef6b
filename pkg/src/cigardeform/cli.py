"""Command-line entry point: ``verify``, ``solve``, ``eval`` and ``transform``.

Exit codes: 0 on success, 1 when a check fails or the solver does not
converge, 2 for usage and I/O errors (message on stderr).  Reports and grids
use 17 significant digits so they round-trip exactly and are byte-identical
across runs with the same inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from . import eigensolve as es
from . import geometry as ge
from . import liouville as lv
from . import models
from .errors import DomainError, MissingPotentialError, NonConvergenceError
from .fixtures import NAMED_V, named_V

QUANTITIES = ("christoffel", "riemann", "ricci", "sectional", "soliton-residual", "gauss")
DIRECTIONS = ("v2y", "y2w", "v2w")


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


# --- serialization -------------------------------------------------------------

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats written to 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def emit_grid(field: es.GridField, path: str) -> None:
    """Write ``xi,x,value`` rows in x-major order (x outer, xi inner)."""
    g = field.grid
    lines = ["xi,x,value"]
    for j, x in enumerate(g.x):
        row = field.values[j]
        lines.extend(f"{fmt(xi)},{fmt(x)},{fmt(v)}" for xi, v in zip(g.xi, row))
    _write_text(path, "\n".join(lines) + "\n")


def read_grid(path: str, grid: es.HalfStripGrid) -> es.GridField:
    """Inverse of :func:`emit_grid` for a known grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return es.GridField(data[:, 2].reshape(grid.shape), grid)


# --- verify ------------------------------------------------------------------

def build_report(suite: str, seed: int, tol_scale: float = 1.0) -> dict:
    from . import checks

    results = [c.run(seed=seed, tol_scale=tol_scale).to_dict() for c in checks.checks_for(suite)]
    report = {"suite": suite, "checks": results, "pass": all(r["pass"] for r in results),
              "seed": seed, "version": __version__}
    if tol_scale != 1.0:
        report["tol_scale"] = tol_scale
    return report


def _cmd_verify(args) -> int:
    from . import checks

    if args.suite != "all" and args.suite not in checks.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(checks.SUITES + ('all',))}")
    if not (args.tol_scale > 0 and math.isfinite(args.tol_scale)):
        raise UsageError("--tol-scale must be a positive number")
    report = build_report(args.suite, args.seed, args.tol_scale)
    _write_text(args.out, to_json(report) + "\n")
    if args.out not in (None, "-"):
        for r in report["checks"]:
            print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']}  rel={r['max_rel_residual']:.3e}  "
                  f"tol={r['tolerance']:.1e}")
        print(f"{'PASS' if report['pass'] else 'FAIL'}: {sum(r['pass'] for r in report['checks'])}"
              f"/{len(report['checks'])} checks")
    return 0 if report["pass"] else 1


# --- solve -------------------------------------------------------------------

def solve_report(grid: es.HalfStripGrid, W: es.GridField, info: es.SolveInfo, cfg: es.SolverConfig) -> dict:
    exact = es.w0_exact(grid).values
    err = np.abs(W.values - exact)
    far = grid.xi >= 0.5 - 1e-12
    near = ~far & (grid.xi > 0)
    probe = es.slack_probe(W)
    return {
        "reduction_policy": es.REDUCTION_POLICY,
        "kernel": info.kernel,
        "method": info.method,
        "bc": "w0",
        "xi_max": grid.xi_max, "x_max": grid.x_max, "h": grid.h,
        "nodes": [grid.n_xi + 1, grid.n_x + 1],
        "linear_tol": cfg.linear_tol,
        "iterations": info.iterations,
        "relative_residual": info.relative_residual,
        "max_error": float(err[:, far].max()),
        "relative_error": float(err[:, far].max() / exact.max()),
        "near_wall_max_error": float(err[:, near].max()) if near.any() else 0.0,
        "min_slack": probe.min_slack,
        "min_slack_at": {"xi": probe.location[0], "x": probe.location[1]},
        "version": __version__,
    }


def _cmd_solve(args) -> int:
    try:
        grid = es.HalfStripGrid(args.xi_max, args.x_max, args.h)
        cfg = es.SolverConfig(method=args.method, linear_tol=args.linear_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        W, info = es.solve_dirichlet(grid, es.w0_boundary(grid), cfg, zero_wall=True)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit_grid(W, args.out)
    if args.report:
        _write_text(args.report, to_json(solve_report(grid, W, info, cfg)) + "\n")
    return 0


# --- eval --------------------------------------------------------------------

def _parse_point(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--at expects comma-separated numbers, got {text!r}") from None
    if not 2 <= len(vals) <= 3 or not all(math.isfinite(v) for v in vals):
        raise UsageError("--at expects 2 or 3 finite coordinates")
    return vals


def evaluate_quantity(model: str, quantity: str, at: Sequence[float]) -> dict:
    m = models.fixture(model)
    if len(at) != m.dim:
        raise UsageError(f"{model} has {m.dim} coordinates ({', '.join(m.coords)}), got {len(at)}")
    p = [np.asarray(v, dtype=float) for v in at]
    out: dict[str, Any] = {"model": model, "quantity": quantity, "coords": list(m.coords), "at": list(at)}
    if quantity == "christoffel":
        out["gamma"] = ge.christoffel(m, p).gamma  # gamma[k][i][j] = Γ^k_ij
    elif quantity == "riemann":
        out["riemann"] = ge.curvature(m, p).riemann
    elif quantity == "ricci":
        out["ricci"] = ge.curvature(m, p).ricci
    elif quantity == "sectional":
        sec = ge.curvature(m, p).sectional
        out["sectional"] = {f"{m.coords[i]},{m.coords[j]}": float(v) for (i, j), v in sorted(sec.items())}
    elif quantity == "soliton-residual":
        res = ge.soliton_residual(m, p)
        out["eq_residual"] = float(res.eq_residual)
        out["bianchi_residual"] = float(res.bianchi_residual)
    elif quantity == "gauss":
        if m.dim != 2:
            raise UsageError(f"gauss needs a surface; {model} is {m.dim}-dimensional")
        out["gauss"] = float(ge.gauss_curvature(m, p))
    else:
        raise UsageError(f"unknown quantity {quantity!r}")
    return out


def _cmd_eval(args) -> int:
    at = _parse_point(args.at)
    _write_text(None, to_json(evaluate_quantity(args.model, args.quantity, at)) + "\n")
    return 0


# --- transform ---------------------------------------------------------------

def _read_nodes(path: str) -> list[tuple[str, float, float]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            if "fixture" not in cols:
                raise UsageError("input must carry a 'fixture' column naming a built-in field; "
                                 "free-form sampled data cannot be transformed")
            missing = [c for c in ("xi", "x") if c not in cols]
            if missing:
                raise UsageError(f"input lacks column(s) {', '.join(missing)}")
            rows = []
            for n, row in enumerate(reader, start=2):
                name = row["fixture"].strip()
                if name not in NAMED_V:
                    raise UsageError(f"line {n}: unknown fixture {name!r}; choose from {', '.join(sorted(NAMED_V))}")
                try:
                    rows.append((name, float(row["xi"]), float(row["x"])))
                except (TypeError, ValueError):
                    raise UsageError(f"line {n}: xi and x must be numbers") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise UsageError("input has no data rows")
    return rows


def transform_values(direction: str, name: str, xi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the named V field pushed through ``direction`` at nodes ``(ξ, x)``.

    ``v2y`` gives Y; ``y2w`` gives W from the ξ-form (derivatives of Y);
    ``v2w`` gives W from the r-form (derivatives of V at ``r = r(ξ)``).
    """
    V = named_V(name)
    if np.any(xi <= 0):
        raise UsageError("transform nodes need xi > 0")
    if direction == "v2y":
        return np.asarray(lv.Y_from_V(V)(xi, x), dtype=float) + 0.0 * xi
    if direction == "y2w":
        return lv.W_from_Y(lv.Y_from_V(V), (xi, x))
    if direction == "v2w":
        return lv.W_from_V(V, (lv.r_of_xi(xi), x))
    raise UsageError(f"unknown direction {direction!r}")


def _cmd_transform(args) -> int:
    rows = _read_nodes(args.grid)
    names = np.array([r[0] for r in rows])
    xi = np.array([r[1] for r in rows])
    x = np.array([r[2] for r in rows])
    values = np.empty(len(rows))
    for name in sorted(set(names)):
        sel = names == name
        values[sel] = transform_values(args.direction, name, xi[sel], x[sel])
    lines = ["xi,x,value"] + [f"{fmt(a)},{fmt(b)},{fmt(v)}" for a, b, v in zip(xi, x, values)]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# --- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        kw.setdefault("add_help", False)
        super().__init__(*a, **kw)
        self.add_argument("--help", action="help", help="show this message and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cigardeform", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    v.add_argument("--suite", default="all", help="geometry, variation, liouville, appendix, solver or all")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
    v.add_argument("--out", default=None, help="report path (default stdout)")
    v.set_defaults(run=_cmd_verify)

    s = sub.add_parser("solve", help="solve for W with the W0 data and write the grid as CSV")
    s.add_argument("--xi-max", type=float, default=6.0)
    s.add_argument("--x-max", type=float, default=4.0)
    s.add_argument("--h", type=float, default=0.05)
    s.add_argument("--bc", choices=("w0",), default="w0")
    s.add_argument("--method", choices=es.METHODS, default="cg")
    s.add_argument("--linear-tol", type=float, default=1e-10)
    s.add_argument("--out", required=True)
    s.add_argument("--report", default=None, help="optional JSON report path")
    s.set_defaults(run=_cmd_solve)

    e = sub.add_parser("eval", help="print a geometric quantity of a fixture at one point")
    e.add_argument("--model", choices=tuple(models.FIXTURES), required=True)
    e.add_argument("--quantity", choices=QUANTITIES, required=True)
    e.add_argument("--at", required=True, help="c1,c2[,c3]")
    e.set_defaults(run=_cmd_eval)

    t = sub.add_parser("transform", help="evaluate Y or W of built-in fields at listed nodes")
    t.add_argument("--grid", required=True, help="CSV with columns fixture, xi, x")
    t.add_argument("--direction", choices=DIRECTIONS, required=True)
    t.add_argument("--out", default=None, help="output CSV (default stdout)")
    t.set_defaults(run=_cmd_transform)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 for --help
        return int(exc.code or 0)
    try:
        return args.run(args)
    except (UsageError, DomainError, MissingPotentialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
