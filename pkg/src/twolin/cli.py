"""Command-line interface.

Subcommands: analyze (drift matrix and eigen analysis), drift (exact /
brute-force / Monte-Carlo drift at a state), run (single trajectory or
batch), scan (chi x n sweep with CSV output), verify (property suites).
Data goes to stdout or --out; every invocation echoes its fully resolved
configuration to stderr. Exit codes: 0 success, 1 property violation,
2 usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import ea, experiments, verify as verify_mod
from .drift_matrix import (
    DegenerateMatrixError,
    build_matrix,
    classify,
    eigen_analysis,
)
from .exact_drift import brute_force_drift, exact_drift, mc_drift
from .params import Params, State
from .potential import build_potential, y_statistic


def _echo_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func", "cli_set")}
    print(f"# config {json.dumps(cfg, sort_keys=True, default=str)}",
          file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _record(data: dict, fmt: str) -> str:
    """One flat record as JSON or as a two-line CSV."""
    flat = {}
    for k, v in data.items():
        if isinstance(v, (list, tuple)):
            for idx, item in enumerate(v):
                flat[f"{k}_{idx}"] = item
        else:
            flat[k] = v
    if fmt == "json":
        return json.dumps(flat, sort_keys=True)
    buf = io.StringIO()
    keys = sorted(flat)
    buf.write(",".join(keys) + "\n")
    buf.write(",".join(_csv_cell(flat[k]) for k in keys) + "\n")
    return buf.getvalue()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def cmd_analyze(args) -> int:
    try:
        p = Params(args.chi, args.rho, args.ell, 1000)
        m = build_matrix(p)
        es = eigen_analysis(m)
        verdict = classify(p)
    except (ValueError, DegenerateMatrixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rec = {
        "chi": args.chi, "rho": args.rho, "ell": args.ell,
        "a": m.a, "b": m.b, "c": m.c, "d": m.d,
        "gamma0": es.gamma0, "lambda1": es.lambda1, "lambda2": es.lambda2,
        "e1": list(es.e1), "e2": list(es.e2),
        "classifier": es.classifier, "verdict": verdict.value,
    }
    if args.potential:
        pot = build_potential(es)
        rec.update(w1=pot.w1, w2=pot.w2, kappa1=pot.kappa1, kappa2=pot.kappa2)
    _emit(_record(rec, args.format), args.out)
    return 0


def cmd_drift(args) -> int:
    try:
        p = Params(args.chi, args.rho, args.ell, args.n)
        s = State(args.xl, args.xr).check_bounds(p)
        if args.method == "exact":
            dv = exact_drift(s, p)
        elif args.method == "brute":
            dv = brute_force_drift(s, p)
        else:
            rng = np.random.default_rng(args.seed)
            dv = mc_drift(s, p, args.samples, rng)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rec = {
        "chi": args.chi, "rho": args.rho, "ell": args.ell, "n": args.n,
        "x_L": args.xl, "x_R": args.xr,
        "d_L": dv.d_l, "d_R": dv.d_r, "method": dv.method,
        "truncation_mass": dv.truncation_mass,
        "samples": dv.samples,
        "ci_halfwidth": list(dv.ci_halfwidth),
    }
    _emit(_record(rec, args.format), args.out)
    return 0


def _start_spec(args, p: Params) -> ea.StartSpec:
    if args.start == "uniform":
        return ea.UniformStart()
    if args.start == "zeros":
        return ea.AllZerosStart()
    if args.start == "explicit":
        if args.xl is None or args.xr is None:
            raise ValueError("explicit start needs --xl and --xr")
        return ea.ExplicitStart(State(args.xl, args.xr).check_bounds(p))
    if args.start == "total":
        if args.total is None:
            raise ValueError("total start needs --total")
        return ea.TotalZerosStart(args.total, args.placement)
    raise ValueError(f"unknown start {args.start!r}")


def cmd_run(args) -> int:
    try:
        p = Params(args.chi, args.rho, args.ell, args.n)
        budget = args.budget if args.budget else \
            int(np.ceil(args.budget_mult * p.n * np.log(p.n)))
        cfg = ea.RunConfig(p, _start_spec(args, p), budget, args.seed,
                           args.record_every)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.trials == 1:
        traj = ea.run(cfg)
        buf = io.StringIO()
        if args.y_stat:
            es = eigen_analysis(build_matrix(p))
            ys = y_statistic(traj, es)
            buf.write("t,x_L,x_R,Y\n")
            for (t, xl, xr), (_, y) in zip(traj.rows(), ys):
                buf.write(f"{t},{xl},{xr},{float(y)!r}\n")
        else:
            buf.write("t,x_L,x_R\n")
            for t, xl, xr in traj.rows():
                buf.write(f"{t},{xl},{xr}\n")
        _emit(buf.getvalue(), args.out)
    else:
        trajs = ea.batch_run(cfg, args.trials)
        _emit(json.dumps(ea.batch_summary(trajs, budget), sort_keys=True),
              args.out)
    return 0


def _parse_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def cmd_scan(args) -> int:
    try:
        fields = {
            "rho": args.rho, "ell": args.ell, "chi_grid": args.chi_grid,
            "n_list": args.n_list, "trials": args.trials,
            "budget_mult": args.budget_mult, "start": args.start,
            "seed": args.seed,
        }
        if args.config:
            file_vals = _parse_config_file(args.config)
            casts = {
                "rho": float, "ell": float, "chi_grid": str, "n_list": str,
                "trials": int, "budget_mult": float, "start": str, "seed": int,
            }
            for key, raw in file_vals.items():
                if key not in casts:
                    raise ValueError(f"unknown config key {key!r}")
                if fields.get(key) is None or key not in args.cli_set:
                    fields[key] = casts[key](raw)
        if fields["chi_grid"] is None or fields["n_list"] is None:
            raise ValueError("chi grid and n list are required "
                             "(--chi-grid/--n-list or config file)")
        cfg = experiments.SweepConfig(
            rho=fields["rho"], ell=fields["ell"],
            chi_grid=_floats(fields["chi_grid"]),
            n_list=_ints(fields["n_list"]),
            trials=fields["trials"], budget_mult=fields["budget_mult"],
            start=fields["start"], seed=fields["seed"],
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    res = experiments.sweep(cfg)
    _emit(res.csv(), args.out)
    if args.summary_out:
        with open(args.summary_out, "w") as fh:
            json.dump(res.summary(), fh, sort_keys=True, indent=1)
    return 0


def cmd_verify(args) -> int:
    names = ["oracle", "domination", "potential"] if args.suite == "all" \
        else [args.suite]
    fault = 1.001 if args.inject_fault else 1.0
    if args.inject_fault:
        print("# WARNING test-only fault injection active", file=sys.stderr)
    results = verify_mod.run_suites(names, fault=fault)
    width = max(len(f"{r.suite}/{r.name}") for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status}  {f'{r.suite}/{r.name}':<{width}}  {r.detail}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twolin",
        description="Two-part dynamic linear benchmark and drift analysis toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0,
                        help="64-bit master seed (default 0)")
        sp.add_argument("--out", default=None,
                        help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("analyze", help="drift matrix, eigen system, verdict")
    sp.add_argument("--chi", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--ell", type=float, required=True)
    sp.add_argument("--potential", action="store_true",
                    help="include potential coefficients and norm constants")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("drift", help="drift vector at a state")
    sp.add_argument("--chi", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--ell", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--xl", type=int, required=True,
                    help="zero bits in the left part")
    sp.add_argument("--xr", type=int, required=True,
                    help="zero bits in the right part")
    sp.add_argument("--method", choices=("exact", "brute", "mc"),
                    default="exact")
    sp.add_argument("--samples", type=int, default=100_000,
                    help="Monte-Carlo sample count")
    common(sp)
    sp.set_defaults(func=cmd_drift)

    sp = sub.add_parser("run", help="run the selection loop")
    sp.add_argument("--chi", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--ell", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=0,
                    help="generation budget (overrides --budget-mult)")
    sp.add_argument("--budget-mult", type=float, default=30.0,
                    help="budget = ceil(mult * n * ln n) when --budget unset")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--record-every", type=int, default=1)
    sp.add_argument("--start", choices=("uniform", "zeros", "explicit", "total"),
                    default="uniform")
    sp.add_argument("--xl", type=int, default=None)
    sp.add_argument("--xr", type=int, default=None)
    sp.add_argument("--total", type=int, default=None)
    sp.add_argument("--placement", choices=("uniform", "eigen"),
                    default="uniform")
    sp.add_argument("--y-stat", action="store_true",
                    help="append Y = x_L - gamma0 x_R to the trajectory CSV")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("scan", help="success-rate sweep over a chi x n grid")
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--ell", type=float, default=0.5)
    sp.add_argument("--chi-grid", default=None,
                    help="comma-separated chi values")
    sp.add_argument("--n-list", default=None,
                    help="comma-separated problem sizes")
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--budget-mult", type=float, default=30.0)
    sp.add_argument("--start", choices=("uniform", "zeros", "small"),
                    default="uniform")
    sp.add_argument("--config", default=None,
                    help="key=value file; CLI flags take precedence")
    sp.add_argument("--summary-out", default=None,
                    help="write the summary JSON to this path")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run the property suites")
    sp.add_argument("--suite", choices=("oracle", "domination", "potential",
                                        "all"), default="all")
    sp.add_argument("--inject-fault", action="store_true",
                    help="test-only: perturb one acceptance coefficient and "
                         "confirm the suites catch it")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    argv_list = sys.argv[1:] if argv is None else list(argv)
    args.cli_set = {a.lstrip("-").replace("-", "_").split("=")[0]
                    for a in argv_list if a.startswith("--")}
    _echo_config(args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
