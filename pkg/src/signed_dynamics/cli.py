"""Command-line front end: ``signed-dynamics analyze|simulate|verify|examples``.

Exit codes: 0 success, 1 other package error, 2 bad scenario, 3 analysis cap
exceeded, 4 integrator failure, 5 prediction and simulation conflict.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import (
    CapExceeded,
    DivergenceError,
    GainEvaluationError,
    IntegratorInstability,
    NumericalFailure,
    ScenarioError,
    SignedDynamicsError,
)
from .scenario import BUILTINS, builtin, load, predict, simulate, verify
from .time_varying import analyze_schedule

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SCHEMA = 2
EXIT_CAP = 3
EXIT_INTEGRATOR = 4
EXIT_CONFLICT = 5

_INTEGRATOR_ERRORS = (IntegratorInstability, DivergenceError, NumericalFailure, GainEvaluationError)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scenario_files(sources: list[str]) -> list[str]:
    """Expand directories into their ``*.json`` scenarios, keeping order stable."""
    files = []
    for src in sources:
        p = Path(src)
        if p.is_dir():
            files.extend(str(f) for f in sorted(p.glob("*.json")))
        else:
            files.append(src)
    return files


# ------------------------------------------------------------------ commands


def analyze_report(source: str) -> dict:
    bundle = load(source)
    report = analyze_schedule(bundle.schedule)
    pred = predict(bundle)
    report["prediction"] = {"outcome": pred.outcome.to_dict(), "source": pred.source}
    if bundle.name:
        report["name"] = bundle.name
    return report


def cmd_analyze(args) -> int:
    _emit(_dump(analyze_report(args.scenario)), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    bundle = load(args.scenario)
    traj, gains = simulate(bundle, args.t_end, args.step)
    if args.out:
        stem = Path(args.out)
        stem.with_suffix(".csv").write_text(traj.to_csv())
        stem.with_suffix(".json").write_text(traj.to_json())
        if gains is not None:
            sched = gains.to_schedule(traj.t[-1])
            stem.with_suffix(".gains.json").write_text(_dump(sched.to_dict()))
        return EXIT_OK
    sys.stdout.write(traj.to_csv() if args.format == "csv" else traj.to_json())
    return EXIT_OK


def verify_report(source: str, t_end=None, step=None, tol=None) -> dict:
    """Everything ``verify`` prints for one scenario, with an exit code."""
    try:
        bundle = load(source)
        rec, pred = verify(bundle, t_end, step, tol)
    except SignedDynamicsError as exc:
        return {"scenario": source, "error": str(exc), "exit_code": exit_code_for(exc)}
    out = rec.to_dict()
    out["scenario"] = source
    out["prediction_source"] = pred.source
    out["prediction_details"] = pred.details
    out["exit_code"] = EXIT_CONFLICT if rec.verdict == "conflict" else EXIT_OK
    return out


def cmd_verify(args) -> int:
    files = _scenario_files(args.scenario)
    jobs = max(1, args.jobs)
    call = [(f, args.t_end, args.step, args.tol) for f in files]
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(verify_report, *zip(*call)))
    else:
        reports = [verify_report(*c) for c in call]
    _emit(_dump(reports[0] if len(reports) == 1 else reports), args.out)
    return max(r["exit_code"] for r in reports)


def cmd_examples(args) -> int:
    if args.action == "list":
        width = max(map(len, BUILTINS))
        for name in BUILTINS:
            print(f"{name:<{width}}  {builtin(name).description or ''}")
        return EXIT_OK
    if not args.name:
        raise ScenarioError("missing built-in name", ["examples show/run: give a NAME"])
    if args.action == "show":
        _emit(load(args.name).dumps() + "\n", args.out)
        return EXIT_OK
    report = verify_report(args.name, args.t_end, args.step, args.tol)
    _emit(_dump(report), args.out)
    return report["exit_code"]


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signed-dynamics",
        description="Analyze and simulate opinion dynamics on signed, possibly switching, graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--t-end", type=float, help="integration horizon (default: scenario or 50/rate)")
        p.add_argument("--step", type=float, help="RK4 step (default 1e-3)")

    a = sub.add_parser("analyze", help="topology and connectivity report")
    a.add_argument("scenario", help="scenario JSON file or built-in name (e.g. example1:a31=2)")
    a.add_argument("--out", help="write the report here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="integrate a scenario")
    s.add_argument("scenario")
    run_flags(s)
    s.add_argument("--out", help="file stem; writes STEM.csv and STEM.json (and STEM.gains.json)")
    s.add_argument("--format", choices=("csv", "json"), default="csv", help="stdout format without --out")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="predict, simulate, classify and reconcile")
    v.add_argument("scenario", nargs="+", help="scenario files, directories of *.json, or built-ins")
    run_flags(v)
    v.add_argument("--tol", type=float, help="classifier tolerance (default 1e-6)")
    v.add_argument("--jobs", type=int, default=1, help="parallel workers for several scenarios")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("examples", help="built-in scenarios")
    e.add_argument("action", choices=("list", "show", "run"))
    e.add_argument("name", nargs="?")
    run_flags(e)
    e.add_argument("--tol", type=float)
    e.add_argument("--out")
    e.set_defaults(func=cmd_examples)
    return parser


def exit_code_for(exc: SignedDynamicsError) -> int:
    if isinstance(exc, ScenarioError):
        return EXIT_SCHEMA
    if isinstance(exc, CapExceeded):
        return EXIT_CAP
    if isinstance(exc, _INTEGRATOR_ERRORS):
        return EXIT_INTEGRATOR
    return EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SignedDynamicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for line in getattr(exc, "diagnostics", []):
            print(f"  {line}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
