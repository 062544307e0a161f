"""ccn-lab command-line interface.

Exit codes: 0 ok, 2 domain error, 3 degenerate characteristics, 4 I/O or
configuration, 5 solver failure, 1 failed validation gates.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coeffs import ccn_bundle, curlyK_chain, kappa_exact, printed_xi3, twisted_chain
from .errors import CCNError, ConfigurationError
from .kdv import build_soliton
from .msys import build_rgl_system
from .parallel import worker_count
from .pde.io import fmt
from .regions import region_map
from .rolls import solve_roll
from .simulate import CCN_DEFAULTS, RGL_DEFAULTS, run_ccn, run_rgl
from .validation import run_validation, summary_lines, write_junit

SCHEMA_VERSION = "1.0"

DEFAULTS = {
    "coeffs": {"k": 0.8, "l": 0.0, "branch": "plus", "n_theta": 32},
    "chain": {"k": 0.8, "l": 0.0, "branch": "plus"},
    "regions": {"resolution": 512, "out": "regions.csv", "summary": None},
    "soliton": {"k": 0.8, "l": 0.0, "branch": "plus", "c3": 1.0, "n": 512,
                "field_stride": 4, "out_dir": "soliton"},
    "validate": {"level": "quick", "junit": "validate.xml", "report": None, "quartic": 0.25},
}


# ------------------------------------------------------------------ JSON output

def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits (NaN/inf -> null)."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
    return json.dumps(str(obj))


def emit(doc: dict, command: str, config: dict, stream=None):
    stream = sys.stdout if stream is None else stream
    full = {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__,
            "config": config}
    full.update(doc)
    stream.write(to_json(full) + "\n")


# --------------------------------------------------------------------- configs

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    return data


def resolve(defaults: dict, args: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags; unknown config keys are rejected."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        data = load_config(args.config)
        unknown = sorted(set(data) - set(defaults))
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


# -------------------------------------------------------------------- commands

def cmd_coeffs(args):
    cfg = resolve(DEFAULTS["coeffs"], args)
    b = ccn_bundle((cfg["k"], cfg["l"]), cfg["branch"], n_theta=cfg["n_theta"])
    fd = b.flux
    doc = {
        "k": b.kl.k, "l": b.kl.l, "branch": b.branch, "C": b.C, "tau": b.tau,
        "sigma": b.sigma, "cxy": b.cxy, "kappa": b.kappa, "curlyK": b.curlyK,
        "delta_zz": b.delta_zz,
        "fluxes": {"B": fd.B, "A": fd.A, "B_k": fd.Bk, "B_l": fd.Bl, "A_k": fd.Ak, "A_l": fd.Al},
        "kappa_routes": {"solvability": b.kappa, "flux_directional": b.checks["kappa_flux"],
                         "closed_form": kappa_exact(b.kl, b.C),
                         "printed_polynomial": b.checks["kappa_printed"]},
        "checks": b.checks,
    }
    emit(doc, "coeffs", cfg)
    return 0


def cmd_chain(args):
    cfg = resolve(DEFAULTS["chain"], args)
    st = solve_roll((cfg["k"], cfg["l"]))
    cv = twisted_chain(st, cfg["branch"])
    diff = cv.xi3 - printed_xi3(st, cv.C)
    diff -= (diff @ cv.xi1) / (cv.xi1 @ cv.xi1) * cv.xi1
    doc = {
        "C": cv.C, "xi1": cv.xi1, "xi2": cv.xi2, "xi3": cv.xi3, "xi4": cv.xi4,
        "residuals": cv.residuals(), "curlyK_chain": curlyK_chain(cv),
        "curlyK_termination": cv.termination(),
        "xi3_vs_printed_mod_kernel": float(np.max(np.abs(diff))),
        "rank_L": int(np.linalg.matrix_rank(cv.L)),
    }
    emit(doc, "chain", cfg)
    return 0


def cmd_regions(args):
    cfg = resolve(DEFAULTS["regions"], args)
    rm = region_map(int(cfg["resolution"]))
    try:
        with open(cfg["out"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["k", "l", "delta_zz", "class"])
            for k, l, d, c in rm.rows():
                w.writerow([fmt(k), fmt(l), fmt(d), c])
    except OSError as exc:
        raise ConfigurationError(f"cannot write {cfg['out']}: {exc}") from exc
    doc = {"summary": rm.summary(), "csv": cfg["out"]}
    if cfg["summary"]:
        with open(cfg["summary"], "w") as fh:
            emit(doc, "regions", cfg, fh)
    emit(doc, "regions", cfg)
    return 0


def cmd_simulate(args):
    defaults = RGL_DEFAULTS if args.kind == "rgl" else CCN_DEFAULTS
    if args.config is None:
        raise ConfigurationError("simulate needs --config")
    cfg = resolve(defaults, args)
    doc = run_rgl(cfg) if args.kind == "rgl" else run_ccn(cfg)
    with open(Path(cfg["out_dir"]) / "summary.json", "w") as fh:
        emit(doc, "simulate", cfg, fh)
    emit(doc, "simulate", cfg)
    return 0


def cmd_soliton(args):
    cfg = resolve(DEFAULTS["soliton"], args)
    b = ccn_bundle((cfg["k"], cfg["l"]), cfg["branch"])
    rep = build_soliton(b, float(cfg["c3"]), int(cfg["n"]))
    coarse = build_soliton(b, float(cfg["c3"]), int(cfg["n"]) // 2)
    out = Path(cfg["out_dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "profile.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["zeta", "q_tilde"])
            for z, q in zip(rep.profile.zeta, rep.profile.samples):
                w.writerow([fmt(z), fmt(q)])
        g = rep.mapped.phi.grid
        X, Y = g.mesh()
        s = max(1, int(cfg["field_stride"]))
        with open(out / "field.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["X", "Y", "q", "phi_periodic"])
            for x, y, q, p in zip(X[::s, ::s].ravel(), Y[::s, ::s].ravel(),
                                  rep.mapped.q[::s, ::s].ravel(),
                                  rep.mapped.phi.values[::s, ::s].ravel()):
                w.writerow([fmt(x), fmt(y), fmt(q), fmt(p)])
    except OSError as exc:
        raise ConfigurationError(f"cannot write soliton output: {exc}") from exc
    sc = rep.scaling
    doc = {
        "branch": b.branch, "a_nl": rep.reduction.a_nl, "a_disp": rep.reduction.a_disp,
        "scaling": {"alpha": sc.alpha, "beta": sc.beta, "gamma": sc.gamma,
                    "matching_residuals": list(sc.matching_residuals())},
        "third_angle": rep.mapped.third_angle, "crest_slope_dY_dX": rep.mapped.slope,
        "phi_ramp": rep.mapped.q_mean,
        "ode_residual": rep.ode_residual, "steady_ccn_residual": rep.ccn_residual,
        "steady_ccn_residual_half_n": coarse.ccn_residual,
        "peak_error": rep.peak_error, "tail": rep.tail, "far_field": rep.q_far,
        "grid": {"n": g.nx, "Lx": g.Lx, "Ly": g.Ly},
        "files": [str(out / "profile.csv"), str(out / "field.csv")],
    }
    with open(out / "soliton.json", "w") as fh:
        emit(doc, "soliton", cfg, fh)
    emit(doc, "soliton", cfg)
    return 0


def cmd_validate(args):
    cfg = resolve(DEFAULTS["validate"], args)
    if cfg["level"] not in ("quick", "full"):
        raise ConfigurationError("level must be quick or full")
    sys_ = build_rgl_system(float(cfg["quartic"]))
    results = run_validation(cfg["level"], sys=sys_, workers=worker_count())
    for line in summary_lines(results):
        print(line)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} gates passed")
    try:
        write_junit(results, cfg["junit"])
        if cfg["report"]:
            doc = {"passed": not failed, "failed_gates": failed,
                   "gates": [{"number": r.number, "name": r.name, "passed": r.passed,
                              "runtime": r.runtime, "details": r.details, "notes": r.notes}
                             for r in results]}
            with open(cfg["report"], "w") as fh:
                emit(doc, "validate", cfg, fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot write validation report: {exc}") from exc
    return 1 if failed else 0


# ---------------------------------------------------------------------- parser

def _wavenumber_flags(p):
    p.add_argument("--k", type=float)
    p.add_argument("--l", type=float)
    p.add_argument("--branch", choices=["plus", "minus"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccn-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="CCN coefficients and all cross-checks as JSON")
    _wavenumber_flags(p)
    p.add_argument("--n-theta", dest="n_theta", type=int)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("chain", help="twisted Jordan chain vectors and residuals")
    _wavenumber_flags(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("regions", help="existence / zig-zag region map")
    p.add_argument("--resolution", type=int)
    p.add_argument("--out", help="per-cell CSV path")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("simulate", help="RGL or CCN run from a JSON config")
    p.add_argument("--kind", choices=["rgl", "ccn"], required=True)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("soliton", help="KdV solitary wave mapped back to the CCN phase")
    _wavenumber_flags(p)
    p.add_argument("--c3", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--field-stride", dest="field_stride", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_soliton)

    p = sub.add_parser("validate", help="run the acceptance gates")
    p.add_argument("--level", choices=["quick", "full"])
    p.add_argument("--junit", help="JUnit XML path")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--quartic", type=float, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    for p in sub.choices.values():
        p.add_argument("--config", help="JSON file with parameters (flags override it)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CCNError as exc:
        doc = {"error": {"type": type(exc).__name__, "message": str(exc),
                         "exit_code": exc.exit_code}}
        emit(doc, args.command, {k: v for k, v in vars(args).items() if k != "func"})
        print(f"ccn-lab: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ccn-lab: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
