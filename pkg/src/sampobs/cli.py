"""Command-line front end.

Exit codes: 0 success, 1 parse/IO error, 2 a standing assumption is
violated, 3 negative verdict (rank deficient, failed check), 4 a scheme
precondition does not hold.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle as orc
from .errors import InconsistentSamples, NotApplicable, SchemeError, ValidationError
from .obsmatrix import rank_verdict
from .scheduler import SchemeRequest, check_condition_CCA, is_worst_case, synthesize
from .simkit import read_inputs_csv, read_samples_csv, reconstruct_initial_state, simulate
from .spectral import DEFAULT_H_MAX, DEFAULT_TOL, pathology_report
from .sysmodel import load_schedule, load_system, validate

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_NEGATIVE, EXIT_SCHEME = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _emit(args, payload, text: str | None = None) -> None:
    if text is None:
        if args.timestamps:
            payload = {**payload, "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat()}
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _settings(args) -> dict:
    return {"tol": args.tol, "h_max": args.h_max, "rank_tol": args.rank_tol}


def _system(args):
    system = load_system(args.system)
    res = validate(system)
    if not res.ok:
        raise ValidationError(res.violations)
    return system


def cmd_analyze(args) -> int:
    system = load_system(args.system)
    res = validate(system)
    payload = {"settings": _settings(args), "n": system.n, "validation": res.to_dict()}
    if not res.ok:
        _emit(args, payload)
        return EXIT_INVALID
    rep = pathology_report(system, args.h_max, args.tol)
    payload["pathology"] = rep.to_dict()
    payload["C_never_parallel_to_CA^t"] = check_condition_CCA(system, rep)
    payload["worst_case_spectrum"] = is_worst_case(system, args.tol)
    _emit(args, payload)
    return EXIT_OK


def cmd_check_schedule(args) -> int:
    system = _system(args)
    sched = load_schedule(args.schedule)
    rep = rank_verdict(system, sched, args.rank_tol)
    _emit(args, {"settings": _settings(args), **rep.to_dict()})
    return EXIT_OK if rep.observable else EXIT_NEGATIVE


def cmd_synthesize(args) -> int:
    system = _system(args)
    deltas = tuple(_ints(args.deltas)) if args.deltas else ((args.delta,) if args.delta else ())
    req = SchemeRequest(
        scheme=args.scheme, t=args.t1, T=args.window, tbar=args.tbar, t2=args.t2,
        deltas=deltas, candidates=tuple(_ints(args.candidates)) if args.candidates else (),
    )
    if req.scheme.replace("-", "_") in ("third_order", "doubling") and req.t2 is None:
        raise ValueError("--t2 is required for this scheme")
    result = synthesize(system, req, None, args.h_max, args.tol)
    _emit(args, {"settings": _settings(args), **result.to_dict()})
    return EXIT_OK


def cmd_simulate(args) -> int:
    system = _system(args)
    x0 = np.array([complex(x) for x in args.x0.split(",")])
    if not np.any(x0.imag):
        x0 = x0.real
    inputs = read_inputs_csv(args.inputs) if args.inputs else None
    traj = simulate(system, x0, inputs, args.tmax)
    _emit(args, None, traj.to_csv())
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    system = _system(args)
    sched = load_schedule(args.schedule)
    ts, ys = read_samples_csv(args.samples)
    lookup = dict(zip(ts, ys))
    missing = [t for t in sched.instants if t not in lookup]
    if missing:
        raise ValueError(f"samples file lacks instants {missing}")
    inputs = read_inputs_csv(args.inputs) if args.inputs else None
    try:
        rec = reconstruct_initial_state(system, sched, [lookup[t] for t in sched.instants],
                                        inputs, args.rank_tol)
    except InconsistentSamples as exc:
        _emit(args, {"settings": _settings(args), "error": "InconsistentSamples", "message": str(exc)})
        return EXIT_NEGATIVE
    _emit(args, {"settings": _settings(args), **rec.to_dict()})
    return EXIT_OK if rec.unique else EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    kind = args.check
    trials = {
        "real-spectrum": orc.check_real_spectrum_trials,
        "positive-spectrum": orc.check_positive_spectrum_trials,
        "regular": orc.check_regular_trials,
        "third-order": orc.check_third_order_trials,
        "doubling": orc.check_doubling_trials,
    }
    if kind in trials:
        fn = trials[kind]
        kw = {"seed": args.seed}
        if args.trials:
            kw["trials"] = args.trials
        out = fn(**kw)
        _emit(args, out.to_dict())
        return EXIT_OK if out.passed else EXIT_NEGATIVE
    if kind == "ninth-root":
        facts = orc.ninth_root_checks()
        facts["ca9_over_c"] = [z.real for z in facts["ca9_over_c"]]
        _emit(args, facts)
        ok = facts["rank_eight_of_nine"] == 8 and facts["rank_with_residue_8"] == 9
        return EXIT_OK if ok else EXIT_NEGATIVE
    if not args.system:
        raise ValueError(f"oracle {kind} needs a system file")
    system = _system(args)
    if kind == "min-samples":
        study = orc.min_samples_in_window(system, args.t0, args.window, args.cap, args.seed)
        _emit(args, study.to_dict())
        return EXIT_OK
    if kind == "bound-second-order":
        out = orc.check_bound_second_order(system, args.t0, args.window)
    elif kind == "bound-real-window":
        out = orc.check_bound_real_window(system, args.t0, args.window)
    elif kind == "worst-case":
        out = orc.check_worst_case_equivalence(system, args.window)
    else:
        raise ValueError(f"unknown oracle check {kind!r}")
    _emit(args, out.to_dict())
    return EXIT_OK if out.passed else EXIT_NEGATIVE


ORACLE_CHECKS = ("min-samples", "bound-second-order", "bound-real-window", "worst-case", "real-spectrum",
                 "positive-spectrum", "regular", "third-order", "doubling", "ninth-root")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="tolerance for modulus/phase comparisons (default %(default)g)")
    common.add_argument("--h-max", type=int, default=DEFAULT_H_MAX,
                        help="search bound for pathological periods (default %(default)d)")
    common.add_argument("--rank-tol", type=float, default=None,
                        help="relative singular value threshold (default 1e-9 * max(l, n))")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker cap (work runs in-process)")
    common.add_argument("--timestamps", action="store_true", help="stamp JSON reports with the time")

    p = _Parser(prog="sampobs", description="Sample-based observability of discrete-time LTI systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="validate and report pathological periods")
    a.add_argument("system")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check-schedule", parents=[common], help="rank verdict for a schedule")
    c.add_argument("system")
    c.add_argument("schedule")
    c.set_defaults(func=cmd_check_schedule)

    s = sub.add_parser("synthesize", parents=[common], help="build a guaranteed schedule")
    s.add_argument("system")
    s.add_argument("--scheme", required=True,
                   choices=["regular", "second_order", "real_eigs", "third_order", "doubling"])
    s.add_argument("--t1", type=int, default=0, help="first instant / window start")
    s.add_argument("--t2", type=int, help="second base instant (third_order, doubling)")
    s.add_argument("--tbar", type=int, help="spacing for the regular scheme")
    s.add_argument("--window", "-T", type=int, help="window length (second_order, real_eigs)")
    s.add_argument("--delta", type=int, help="shift for third_order")
    s.add_argument("--deltas", help="comma-separated shifts for doubling")
    s.add_argument("--candidates", help="comma-separated candidate instants (real_eigs)")
    s.set_defaults(func=cmd_synthesize)

    m = sub.add_parser("simulate", parents=[common], help="simulate and write a trajectory CSV")
    m.add_argument("system")
    m.add_argument("--x0", required=True, help="comma-separated initial state (complex allowed)")
    m.add_argument("--tmax", type=int, required=True)
    m.add_argument("--inputs", help="CSV with columns u_1..u_m")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", parents=[common], help="estimate x0 from sampled outputs")
    r.add_argument("system")
    r.add_argument("schedule")
    r.add_argument("samples", help="CSV with header t,y")
    r.add_argument("--inputs", help="CSV with columns u_1..u_m")
    r.set_defaults(func=cmd_reconstruct)

    o = sub.add_parser("oracle", parents=[common], help="brute-force checks")
    o.add_argument("check", choices=ORACLE_CHECKS)
    o.add_argument("system", nargs="?")
    o.add_argument("--t0", type=int, default=0)
    o.add_argument("--window", "-T", type=int, default=8)
    o.add_argument("--cap", type=int, default=2000, help="random draws beyond the exhaustive limit")
    o.add_argument("--trials", type=int, help="trial count for randomized checks")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SchemeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCHEME
    except NotApplicable as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCHEME
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
