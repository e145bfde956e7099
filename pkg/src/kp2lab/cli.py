"""Command line entry point ``kp2``.

Subcommands: simulate, estimate, decompose, verify.  Exit codes: 0 success,
1 failed check, 2 configuration or input error, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, load_config
from .report import DIAGNOSTICS_SCHEMA, emit_report

__all__ = ["main", "dispatch"]

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def _parser():
    ap = argparse.ArgumentParser(prog="kp2", description="KP-II numerical lab")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "Picard solve from configured data"),
                        ("estimate", "Monte Carlo estimate experiment"),
                        ("decompose", "p-variation and greedy decomposition of a stored path"),
                        ("verify", "run the acceptance checks 1-14 at reduced counts")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        if name == "verify":
            p.add_argument("--full", action="store_true", help="use full acceptance counts")
            p.add_argument("--only", type=int, action="append", metavar="N",
                           help="run only check N (repeatable)")
    return ap


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _simulate(cfg, out):
    from .snapshot import write_field, write_path
    from .solver import SolverDivergence, make_initial_data, picard_solve
    sc = cfg.solver_config(brackets=False)
    u0 = make_initial_data(sc)
    write_field(os.path.join(out, "initial.kp2f"), u0, 0.0)
    try:
        u, d = picard_solve(u0, sc)
        code = EXIT_OK
    except SolverDivergence as exc:
        d = exc.diagnostics
        u = None
        code = EXIT_DIVERGED
        print(f"kp2: {exc}", file=sys.stderr)
    emit_report(d.rows(), DIAGNOSTICS_SCHEMA, os.path.join(out, "diagnostics"))
    if u is not None:
        write_path(os.path.join(out, "solution.kp2f"), u)
        emit_report([{"t": float(t), "I0": float(a), "I1": float(b)}
                     for t, a, b in zip(d.times, d.I0, d.I1)], ("t", "I0", "I1"),
                    os.path.join(out, "invariants"))
    _write_json(os.path.join(out, "summary.json"), {
        "converged": d.converged, "iterations": d.iterations,
        "fixed_point_residual": d.fixed_point_residual, "data_norm": d.data_norm,
        "probe_times": list(map(float, d.probe_times)),
        "scattering_increments": list(map(float, d.scattering_increments)),
        "warnings": d.warnings, "diverged": code == EXIT_DIVERGED,
    })
    return code


def _estimate(cfg, out):
    from .estimates import run_estimate
    spec = cfg.estimate_spec()
    rep = run_estimate(spec)
    emit_report(rep.rows(), ("trial", "seed", "numerator", "denominator", "ratio"),
                os.path.join(out, "report"))
    summary = rep.summary()
    summary.update(rep.extra)
    _write_json(os.path.join(out, "summary.json"), summary)
    return EXIT_OK


def _decompose(cfg, out):
    from .paths import greedy_decompose, p_variation_norm
    from .snapshot import read_path
    if not cfg["data.file"]:
        raise ConfigError("decompose needs a stored path", "data.file")
    path = read_path(cfg["data.file"])
    p = cfg["pvar.p"]
    vn = p_variation_norm(path, p)
    if vn == 0:
        raise ConfigError("stored path is identically zero", "data.file")
    levels = greedy_decompose(path, p, cfg["pvar.levels"], vn)
    rows = [{"n": L.n, "count": L.count, "count_bound": L.count_bound, "sup_u": L.sup_u,
             "sup_u_bound": L.sup_u_bound, "sup_v": L.sup_v, "sup_v_bound": L.sup_v_bound,
             "bounds_hold": L.bounds_hold()} for L in levels]
    emit_report(rows, list(rows[0]), os.path.join(out, "decomposition"))
    _write_json(os.path.join(out, "summary.json"), {"p": p, "vp_norm": vn, "samples": len(path)})
    return EXIT_OK if all(r["bounds_hold"] for r in rows) else EXIT_ASSERT


def _verify(cfg, out, full=False, only=None):
    from .checks import run_checks
    results = run_checks(only, reduced=not full)
    for r in results:
        print(r.line())
    rows = [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results]
    emit_report(rows, ("number", "name", "passed", "detail"), os.path.join(out, "verify"))
    return EXIT_OK if all(r.passed for r in results) else EXIT_ASSERT


def dispatch(argv) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.set)
        out = cfg["output.dir"]
        os.makedirs(out, exist_ok=True)
        if args.command == "simulate":
            return _simulate(cfg, out)
        if args.command == "estimate":
            return _estimate(cfg, out)
        if args.command == "decompose":
            return _decompose(cfg, out)
        return _verify(cfg, out, args.full, args.only)
    except ConfigError as exc:
        print(f"kp2: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"kp2: input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"kp2: assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT


def main(argv=None) -> int:
    np.seterr(all="warn")
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
