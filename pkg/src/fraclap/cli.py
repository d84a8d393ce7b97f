"""Command-line entry point: one subcommand per module, diffable artifacts.

Configs are JSON and validated against a schema before anything is
computed; unknown keys are rejected so typos fail loudly.  Every file
artifact is written to a temp file and atomically renamed, so a failed run
never leaves a partial file.  JSON objects are emitted with sorted keys
and repr-exact floats: identical config and seed give byte-identical
output.

Exit codes: 0 success (and verify suites with no failing check), 1 a
verify check failed or an estimator did not converge, 2 usage or
configuration errors.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import jsonschema
import numpy as np

from .ball import BallProblem, dirichlet_field, s_mean_average, solve_full
from .constants import constant_set
from .density import approximate, build_basis, _design, _grids
from .errors import ConvergenceFailure, FraclapError, UsageError
from .fields import as_points, catalog, interpolated_field_1d, list_catalog
from .extension import build_extension, conormal_trace, trace_constant
from .mc import (BallDomain, BoxDomain, McConfig, UnionDomain,
                 mc_solve_dirichlet)
from .pointwise import frac_lap_point
from .spectral import PeriodicGrid, frac_lap_spectral, sample_on_grid
from .verify import run_all

__all__ = ["RunConfig", "main"]


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict
    output: str          # path, or "-" for stdout
    format: str          # "json" or "csv"


# ---------------------------------------------------------------------------
# emission helpers


def _atomic_write(text, path):
    if path == "-":
        sys.stdout.write(text)
        return
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".fraclap-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# named fields


def _csv_sampled_field(spec):
    """1-d field interpolated from CSV samples, zero outside their range."""
    data = np.loadtxt(spec["csv"], delimiter=",", ndmin=2)
    if data.shape[1] != 2:
        raise UsageError("sampled-field CSV needs two columns: x, value")
    order = np.argsort(data[:, 0])
    return interpolated_field_1d(
        data[order, 0], data[order, 1],
        name=f"csv({os.path.basename(spec['csv'])})")


def _named_field(spec, dim, s):
    if isinstance(spec, dict):
        if dim != 1:
            raise UsageError("CSV-sampled fields are one-dimensional")
        return _csv_sampled_field(spec)
    if spec not in list_catalog():
        raise UsageError(f"unknown field {spec!r}; choose from "
                         f"{list_catalog()} or a CSV sample spec")
    return catalog(spec, dim=dim, s=s) if spec == "xplus" else \
        catalog(spec, dim=dim)


def _parse_point(text):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}; use comma floats")


# ---------------------------------------------------------------------------
# config schemas

_FIELD_SPEC = {"oneOf": [
    {"type": "string"},
    {"type": "object",
     "properties": {"csv": {"type": "string"}},
     "required": ["csv"], "additionalProperties": False},
]}

_DOMAIN_SPEC = {"oneOf": [
    {"type": "object",
     "properties": {"kind": {"const": "ball"},
                    "center": {"type": "array", "items": {"type": "number"}},
                    "radius": {"type": "number"}},
     "required": ["kind", "center", "radius"], "additionalProperties": False},
    {"type": "object",
     "properties": {"kind": {"const": "box"},
                    "lo": {"type": "array", "items": {"type": "number"}},
                    "hi": {"type": "array", "items": {"type": "number"}}},
     "required": ["kind", "lo", "hi"], "additionalProperties": False},
    {"type": "object",
     "properties": {"kind": {"const": "union"},
                    "parts": {"type": "array", "minItems": 1}},
     "required": ["kind", "parts"], "additionalProperties": False},
]}

_MC_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "n_samples": {"type": "integer", "minimum": 1},
        "s": {"type": "number"},
        "domain": _DOMAIN_SPEC,
        "g": _FIELD_SPEC,
        "x": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "max_jumps": {"type": "integer", "minimum": 1},
    },
    "required": ["seed", "n_samples", "s", "domain", "g", "x"],
    "additionalProperties": False,
}

_SOLVE_BALL_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "r": {"type": "number", "exclusiveMinimum": 0},
        "s": {"type": "number"},
        "f": _FIELD_SPEC,
        "g": _FIELD_SPEC,
        "points": {"type": "array", "minItems": 1,
                   "items": {"type": "array", "items": {"type": "number"}}},
    },
    "required": ["n", "r", "s", "points"],
    "additionalProperties": False,
}


def _load_config(path, schema):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"malformed JSON config {path}: {e}")
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        raise UsageError(f"config {path} rejected: {e.message}")
    return doc


def _make_domain(spec):
    if spec["kind"] == "ball":
        return BallDomain(tuple(spec["center"]), float(spec["radius"]))
    if spec["kind"] == "box":
        return BoxDomain(tuple(spec["lo"]), tuple(spec["hi"]))
    parts = tuple(_make_domain(p) for p in spec["parts"])
    return UnionDomain(parts)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_constants(args):
    cs = constant_set(args.n, args.s)
    _atomic_write(_json_text(cs.to_dict()), args.out)
    return 0


def _cmd_eval(args):
    pts = np.loadtxt(args.points, delimiter=",", ndmin=2)
    field = _named_field(args.field, pts.shape[1], args.s)
    rows = []
    for p in pts:
        ov = frac_lap_point(field, p, args.s)
        rows.append([*map(float, p), float(ov.value), float(ov.err_est)])
    header = [f"x{i}" for i in range(pts.shape[1])] + ["value", "err_est"]
    _atomic_write(_csv_text(header, rows), args.out)
    return 0


def _cmd_spectral(args):
    field = _named_field(args.field, 1, args.s)
    grid = PeriodicGrid(1, args.L, args.N)
    sf = sample_on_grid(field, grid)
    lap = frac_lap_spectral(sf, args.s)
    x = grid.axis()
    rows = [[float(xi), float(ui), float(li)]
            for xi, ui, li in zip(x, sf.values, lap.values)]
    _atomic_write(_csv_text(["x", "u", "frac_lap_u"], rows), args.out)
    return 0


def _cmd_extend(args):
    x = _parse_point(args.x)
    field = _named_field(args.field, len(x), args.s)
    ext = build_extension(field, args.s)
    levels = [[float(y), float(ext.value(x, y))] for y in ext.y_levels]
    out = {"v_levels": levels, "trace": None, "kappa": None}
    if args.trace:
        tr = conormal_trace(field, x, args.s)
        out["trace"] = float(tr.value)
        out["kappa"] = float(trace_constant(len(x), args.s))
    _atomic_write(_json_text(out), args.out)
    return 0


def _cmd_solve_ball(args):
    cfg = _load_config(args.config, _SOLVE_BALL_SCHEMA)
    n, r, s = cfg["n"], float(cfg["r"]), float(cfg["s"])
    f = _named_field(cfg["f"], n, s) if "f" in cfg else None
    g = _named_field(cfg["g"], n, s) if "g" in cfg else None
    prob = BallProblem(n, r, s, f=f, g=g)
    pts = [np.asarray(p, dtype=float) for p in cfg["points"]]
    if any(len(p) != n for p in pts):
        raise UsageError("evaluation points must match the dimension")
    rows = [[*map(float, p), float(solve_full(prob, p).value)] for p in pts]
    header = [f"x{i}" for i in range(n)] + ["value"]
    if args.out == "-":
        raise UsageError("solve-ball writes two artifacts; --out needs a path")
    _atomic_write(_csv_text(header, rows), args.out)

    # invariant check: the s-mean value property at the first interior
    # point (homogeneous problems only; with a source term it cannot hold)
    report_path = args.report or os.path.splitext(args.out)[0] + ".report.json"
    x0 = next((p for p in pts if float(p @ p) < (0.7 * r) ** 2), None)
    if f is not None or x0 is None:
        rep = {"check_name": "solve_ball_mean_value",
               "inputs": {"n": n, "r": r, "s": s},
               "measured": [["note", "no interior point or source term"]],
               "threshold": "reported-only", "verdict": "reported"}
    else:
        fld = dirichlet_field(prob)
        rho = 0.2 * (r - float(np.sqrt(x0 @ x0)))
        avg = s_mean_average(fld, x0, rho, s)
        u0 = float(fld(x0[None, :])[0])
        resid = abs(avg.value - u0) / (1.0 + abs(u0))
        rep = {"check_name": "solve_ball_mean_value",
               "inputs": {"n": n, "r": r, "s": s,
                          "x0": [float(v) for v in x0], "rho": rho},
               "measured": [["mean_value_residual", resid]],
               "threshold": 1e-3,
               "verdict": "pass" if resid <= 1e-3 else "fail"}
    _atomic_write(_json_text(rep), report_path)
    return 0 if rep["verdict"] != "fail" else 1


def _cmd_mc(args):
    cfg = _load_config(args.config, _MC_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    dom = _make_domain(cfg["domain"])
    g = _named_field(cfg["g"], dom.dim, float(cfg["s"]))
    mc_cfg = McConfig(seed=cfg["seed"], n_samples=cfg["n_samples"],
                      s=float(cfg["s"]), domain=dom,
                      max_jumps=cfg.get("max_jumps", 512))
    blocks = {}
    sink = (lambda b, v: blocks.__setitem__(b, v)) if args.dump_samples else None
    est = mc_solve_dirichlet(g, mc_cfg, np.asarray(cfg["x"], dtype=float),
                             sample_sink=sink)
    out = {"estimate": est.estimate, "stderr": est.stderr,
           "n_effective": est.n_effective,
           "truncated_walks": est.truncated_walks}
    _atomic_write(_json_text(out), args.out)
    if args.dump_samples:
        rows = [[b, i, float(v)] for b in sorted(blocks)
                for i, v in enumerate(blocks[b])]
        _atomic_write(_csv_text(["block", "index", "payoff"], rows),
                      args.dump_samples)
    return 0


def _cmd_verify(args):
    reports = run_all(args.suite)
    _atomic_write(_json_text([r.as_dict() for r in reports]), args.out)
    return 1 if any(r.verdict == "fail" for r in reports) else 0


def _cmd_approx(args):
    target = _named_field(args.target, 1, args.s)
    basis = build_basis(args.R, args.m, args.width, args.s)
    res = approximate(target, basis, norm=args.norm)
    out = {"coefficients": _plain(res.coefficients),
           "achieved_error": res.achieved_error,
           "validation_error": res.validation_error,
           "condition_estimate": res.condition_estimate,
           "norm": res.norm,
           "centers": _plain(np.asarray(basis.centers))}
    _atomic_write(_json_text(out), args.out)
    table = args.table
    if table is None and args.out != "-":
        table = os.path.splitext(args.out)[0] + ".csv"
    if table is not None:
        x, _ = _grids()
        fit = _design(basis, x) @ res.coefficients
        tv = target(as_points(x[:, None], 1))
        rows = [[float(a), float(b), float(c)] for a, b, c in zip(x, tv, fit)]
        _atomic_write(_csv_text(["x", "target", "fit"], rows), table)
    return 0


# ---------------------------------------------------------------------------


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="fraclap",
        description="numerical toolkit for the fractional Laplacian")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, fmt):
        p.add_argument("--out", default="-", metavar="PATH",
                       help=f"output {fmt} path ('-' = stdout)")

    p = sub.add_parser("constants", help="special constants for (n, s)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    common(p, "json")
    p.set_defaults(fn=_cmd_constants, format="json")

    p = sub.add_parser("eval", help="pointwise fractional Laplacian")
    p.add_argument("--field", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--points", required=True, metavar="CSV",
                   help="CSV file of evaluation points, one per row")
    common(p, "csv")
    p.set_defaults(fn=_cmd_eval, format="csv")

    p = sub.add_parser("spectral", help="periodized spectral operator")
    p.add_argument("--field", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--L", type=float, default=64.0)
    p.add_argument("--N", type=int, default=4096)
    common(p, "csv")
    p.set_defaults(fn=_cmd_spectral, format="csv")

    p = sub.add_parser("extend", help="harmonic extension profile and trace")
    p.add_argument("--field", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--x", required=True, help="point, comma-separated floats")
    p.add_argument("--trace", action="store_true")
    common(p, "json")
    p.set_defaults(fn=_cmd_extend, format="json")

    p = sub.add_parser("solve-ball", help="Dirichlet problem on a ball")
    p.add_argument("--config", required=True, metavar="JSON")
    p.add_argument("--report", default=None, metavar="JSON",
                   help="invariant-check report path "
                        "(default: <out>.report.json)")
    common(p, "csv")
    p.set_defaults(fn=_cmd_solve_ball, format="csv")

    p = sub.add_parser("mc", help="walk-on-balls Monte Carlo solver")
    p.add_argument("--config", required=True, metavar="JSON")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--dump-samples", default=None, metavar="CSV")
    common(p, "json")
    p.set_defaults(fn=_cmd_mc, format="json")

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", default="all",
                   choices=["all", "max", "harnack", "regularity"])
    common(p, "json")
    p.set_defaults(fn=_cmd_verify, format="json")

    p = sub.add_parser("approx", help="s-harmonic least-squares fit")
    p.add_argument("--target", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--width", type=float, default=0.35)
    p.add_argument("--norm", default="C0", choices=["C0", "C1"])
    p.add_argument("--table", default=None, metavar="CSV",
                   help="fitted-curve table (default: <out>.csv)")
    common(p, "json")
    p.set_defaults(fn=_cmd_approx, format="json")
    return ap


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    RunConfig(args.subcommand, {k: v for k, v in vars(args).items()
                                if k not in ("fn", "subcommand")},
              args.out, args.format)
    try:
        return args.fn(args)
    except (UsageError, FileNotFoundError) as e:
        print(f"fraclap: error: {e}", file=sys.stderr)
        return 2
    except ConvergenceFailure as e:
        print(f"fraclap: convergence failure: {e}", file=sys.stderr)
        return 1
    except FraclapError as e:
        print(f"fraclap: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
