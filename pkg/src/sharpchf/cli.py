"""Command line entry point: ``sharpchf {constants,q,table,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import constants, moment_bounds, verifier
from .distributions import DiscreteDistribution, is_standardized, standardize
from .exceptions import DomainError
from .moment_bounds import round_down, round_up

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# lambda^* typed with 6 decimals may land just above the true value
LAMBDA_INPUT_SLACK = 5e-7


class UsageError(Exception):
    pass


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _fmt(value, precision, up=False):
    if isinstance(value, str):
        return value
    rounder = round_up if up else round_down
    return rounder(float(value), precision)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# constants


def constants_table():
    cc = constants.critical_constants()
    out = {
        "theta1_star": cc.theta1_star,
        "theta3_star": cc.theta3_star,
        "kappa1": cc.kappa1,
        "kappa3": cc.kappa3,
    }
    for n in constants.ANALYTIC_ORDERS:
        out[f"lambda_lower_{n}"] = cc.lambda_star_lower[n]
    for n in constants.ANALYTIC_ORDERS:
        out[f"lambda_upper_{n}"] = cc.lambda_star_upper[n]
    for n in constants.ANALYTIC_ORDERS:
        out[f"q_min_{n}"] = constants.q_min(n)
    return out


def _upper_bound_key(key):
    # kappas and minimal q are used as bound constants: display rounded up
    return key.startswith(("kappa", "q_min"))


def cmd_constants(args):
    values = constants_table()
    if args.format == "json":
        text = json.dumps(values, indent=2) + "\n"
    else:
        shown = {k: _fmt(v, args.precision, up=_upper_bound_key(k)) for k, v in values.items()}
        if args.format == "csv":
            text = _csv_text(["name", "value"], list(shown.items()))
        else:
            text = "".join(f"{k} = {v}\n" for k, v in shown.items())
    _emit(text, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# q


def cmd_q(args):
    n, lam = args.n, args.lam
    if lam < 0:
        raise UsageError("lambda must be nonnegative")
    if args.oracle:
        res = verifier.q_oracle(n, lam, args.tol)
    else:
        if n not in constants.ANALYTIC_ORDERS:
            raise UsageError(f"no closed form for n={n}; pass --oracle")
        hi = constants.lambda_upper(n)
        if hi < lam <= hi + LAMBDA_INPUT_SLACK:
            print(f"note: lambda={lam} read as lambda^*({n}) = {hi!r}", file=sys.stderr)
            lam = hi
        if lam > hi:
            raise UsageError(
                f"lambda={lam} exceeds lambda^*({n}) = {hi:.12g}; the closed form "
                "is only valid up to there, pass --oracle for a brute-force value"
            )
        res = constants.q(n, lam)
    record = {"n": n, "lambda": lam, "q": res.q, "theta": res.theta,
              "branch": res.branch, "method": res.method}
    if args.oracle:
        record["tol"] = res.tol
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        shown = {k: (_fmt(v, args.precision, up=(k == "q")) if isinstance(v, float) else str(v))
                 for k, v in record.items()}
        if args.oracle:
            shown["tol"] = f"{res.tol:.1e}"
        if args.format == "csv":
            text = _csv_text(list(shown), [list(shown.values())])
        else:
            text = "".join(f"{k} = {v}\n" for k, v in shown.items())
    _emit(text, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# table


def _parse_b_list(raw):
    if not raw:
        return list(moment_bounds.TABLE1_B)
    out = []
    for item in raw:
        out += [s.strip() for s in item.split(",") if s.strip()]
    return ["inf" if s in ("∞", "infinity", "Infinity") else s for s in out]


def cmd_table(args):
    rows = moment_bounds.table1(_parse_b_list(args.b))
    failed = [r for r in rows if len(r) == 2]
    if args.format == "json":
        text = json.dumps(
            [dict(zip(moment_bounds.TABLE1_HEADER, r)) if len(r) > 2 else {"b": r[0], "error": r[1]}
             for r in rows],
            indent=2,
        ) + "\n"
    elif args.format == "csv":
        text = _csv_text(moment_bounds.TABLE1_HEADER, rows)
    else:
        widths = [max(len(str(r[i])) if i < len(r) else 0 for r in rows + [list(moment_bounds.TABLE1_HEADER)])
                  for i in range(len(moment_bounds.TABLE1_HEADER))]
        lines = [" ".join(str(c).rjust(w) for c, w in zip(r, widths)).rstrip()
                 for r in [list(moment_bounds.TABLE1_HEADER)] + rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    for r in failed:
        print(f"b={r[0]}: {r[1]}", file=sys.stderr)
    return EXIT_USAGE if failed else EXIT_OK


# --------------------------------------------------------------------------
# verify


def _load_law(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return DiscreteDistribution.from_json(fh.read())
    except (OSError, json.JSONDecodeError, DomainError) as exc:
        raise UsageError(f"cannot read law from {path}: {exc}") from exc


def verification_run(seed, cases, law=None, oracle_points=10):
    """Everything ``verify`` checks, as a JSON-ready dict with a ``passed`` flag."""
    if law is not None:
        laws = [law if is_standardized(law) else standardize(law)]
        reports = verifier.run_harness(seed, 1, laws=laws)
    else:
        reports = verifier.run_harness(seed, cases)
    equality = {
        case: verifier.equality_attainment(case, verifier.default_equality_grid(case))
        for case in verifier.EQUALITY_CASES
    }
    two_point = max(verifier.extremal_two_point_gap(b) for b in np.linspace(1.0, 20.0, 50))
    oracle = {
        n: verifier.oracle_agreement(n, np.linspace(0.0, constants.lambda_upper(n), oracle_points))
        for n in constants.ANALYTIC_ORDERS
    }
    violations = [r for r in reports if not r.passed]
    passed = (
        not violations
        and all(v < verifier.EQUALITY_TOL for v in equality.values())
        and two_point < 1e-10
        and all(v < 1e-6 for v in oracle.values())
    )
    return {
        "passed": passed,
        "reports": reports,
        "worst": verifier.worst_by_bound(reports),
        "violations": violations,
        "equality": equality,
        "extremal_two_point": two_point,
        "oracle_agreement": oracle,
    }


def cmd_verify(args):
    if args.cases < 1:
        raise UsageError("--cases must be >= 1")
    law = _load_law(args.law_file) if args.law_file else None
    run = verification_run(args.seed, args.cases, law)
    if args.format == "json":
        chosen = run["reports"] if args.full else list(run["worst"].values()) + run["violations"]
        payload = {
            "passed": run["passed"],
            "reports": [r.to_dict() for r in chosen],
            "equality": run["equality"],
            "extremal_two_point": run["extremal_two_point"],
            "oracle_agreement": {str(k): v for k, v in run["oracle_agreement"].items()},
        }
        text = json.dumps(payload, indent=2) + "\n"
    elif args.format == "csv":
        chosen = run["reports"] if args.full else list(run["worst"].values()) + run["violations"]
        text = _csv_text(["bound_id", "slack", "at_t", "law_digest", "detail"],
                         [[r.bound_id, repr(r.slack), repr(r.at_t), r.law_digest, r.detail] for r in chosen])
    else:
        lines = [f"{len(run['reports'])} bound evaluations"]
        for bid, r in run["worst"].items():
            lines.append(f"{bid:<13} worst slack {r.slack: .3e}  {'PASS' if r.passed else 'FAIL'}")
        for case, dev in run["equality"].items():
            lines.append(f"{case:<13} max |LHS-RHS| {dev:.3e}  {'PASS' if dev < verifier.EQUALITY_TOL else 'FAIL'}")
        lines.append(f"{'two_point':<13} max gap {run['extremal_two_point']:.3e}")
        for n, dev in run["oracle_agreement"].items():
            lines.append(f"{'oracle_n' + str(n):<13} max |oracle-analytic| {dev:.3e}")
        for r in run["violations"]:
            lines.append("VIOLATION " + json.dumps(r.to_dict()))
        lines.append("PASSED" if run["passed"] else "FAILED")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK if run["passed"] else EXIT_FAIL


# --------------------------------------------------------------------------


def _precision(text):
    value = int(text)
    if not 1 <= value <= 15:
        raise argparse.ArgumentTypeError("precision must be in [1, 15]")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sharpchf",
        description="Sharp constants for Taylor-remainder bounds on characteristic functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def output_opts(p, default_format="text", precision=6):
        p.add_argument("--format", choices=("text", "csv", "json"), default=default_format)
        p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
        p.add_argument("--precision", type=_precision, default=precision)

    p = sub.add_parser("constants", help="critical angles, kappas, lambda ranges, min q")
    output_opts(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("q", help="evaluate q_n(lambda)")
    p.add_argument("n", type=int)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="brute-force supremum (any n, any lambda)")
    p.add_argument("--tol", type=float, default=1e-9)
    output_opts(p, precision=10)
    p.set_defaults(func=cmd_q)

    p = sub.add_parser("table", help="gamma_n(b), lambda_n(b), q_n for n = 1, 2, 3")
    p.add_argument("--b", action="append", help="b value(s); repeat or comma-separate; 'inf' allowed")
    output_opts(p, default_format="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="run the inequality verification harness")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--law-file", default=None, help='JSON {"atoms": [[value, weight], ...]}')
    p.add_argument("--full", action="store_true", help="emit every report, not only the worst per bound")
    output_opts(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
