"""Command line entry point: ``labeled-ccp <command> ...``.

Every command writes one table (CSV by default, JSON with ``--format json``)
to stdout or ``-o``. Each row carries its full parameter tuple. Exit codes:
0 success, 1 a check or invariant failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .exact import EXACT_COLUMNS, exact_table_rows
from .oracle import RuleMismatch, check_rule_equivalence
from .simulator import ExperimentConfig, InvariantViolation, run_experiment, simulate_records, records_to_csv
from .stats import ci, harmonic, theory_values
from .tails import TAIL_COLUMNS, TAIL_MODES, TailSpec, estimate_tail, na_empirical, na_exact_two_bins, tail_row

SEED_ENV = "LABELED_CCP_SEED"
DEFAULT_SEED = 20250101
Z = 3.0


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(rows: list[dict], columns, fmt: str) -> str:
    columns = list(columns)
    if fmt == "json":
        return json.dumps([{c: row[c] for c in columns} for row in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def _emit(args, rows, columns) -> None:
    text = render(rows, columns, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_theory(args) -> None:
    rows = []
    for n in args.n:
        if n < 3:
            raise UsageError(f"theory values need n >= 3, got {n}")
        th = theory_values(n)
        rows.append({"n": n, "harmonic": harmonic(n), "half_n_hn": th.e_q2, "half_n_hn_minus_half_n": th.e_q1})
    _emit(args, rows, ("n", "harmonic", "half_n_hn", "half_n_hn_minus_half_n"))


def cmd_exact(args) -> None:
    for n in args.n:
        if n < 3:
            raise UsageError(f"exact solver needs n >= 3, got {n}")
    _emit(args, exact_table_rows(args.n), EXACT_COLUMNS)


def cmd_simulate(args) -> None:
    rows = []
    metric_names: list[str] = []
    for n in args.n:
        config = ExperimentConfig(n=n, reps=args.reps, mode=args.mode, k=args.k, workers=args.workers)
        try:
            summaries = run_experiment(config, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        row = {"n": n, "mode": args.mode, "k": args.k, "reps": args.reps, "seed": args.seed, "z": Z}
        for name, summary in summaries.items():
            lo, hi = ci(summary, Z) if summary.count >= 2 else (summary.mean, summary.mean)
            row.update({f"{name}_mean": summary.mean, f"{name}_se": summary.se,
                        f"{name}_ci_low": lo, f"{name}_ci_high": hi})
            if name not in metric_names:
                metric_names.append(name)
        rows.append(row)
        if args.records and args.mode == "labeled":
            path = Path(args.records.replace("{n}", str(n)))
            path.write_text(records_to_csv(simulate_records(config, args.seed)))
    columns = ["n", "mode", "k", "reps", "seed", "z"]
    for name in metric_names:
        columns += [f"{name}_mean", f"{name}_se", f"{name}_ci_low", f"{name}_ci_high"]
    _emit(args, rows, columns)


def cmd_tails(args) -> None:
    rows = []
    for n in args.n:
        for k in args.k:
            for mode in args.modes:
                spec = TailSpec(n=n, k=k, c=args.c, mode=mode)
                try:
                    spec.validate()
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
                result = estimate_tail(spec, args.reps, args.seed, args.workers)
                rows.append({**tail_row(result), "seed": args.seed})
    _emit(args, rows, TAIL_COLUMNS + ("seed",))
    failed = [r for r in rows if not r["passed"]]
    if failed:
        raise CheckFailed(f"{len(failed)} tail row(s) exceed bound + 3 SE")


NA_COLUMNS = ("bins", "balls", "reps", "seed", "exact_joint", "exact_product", "exact_cov",
              "empirical_cov", "empirical_se", "z_score", "joint_le_product")


def cmd_na(args) -> None:
    rows = []
    for bins in args.bins:
        for balls in args.balls:
            try:
                joint, product = na_exact_two_bins(bins, balls)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            est = na_empirical(bins, balls, [0], [1], args.reps, args.seed, args.workers)
            exact_cov = joint - product
            z = (est.value - exact_cov) / est.se if est.se > 0 else 0.0
            rows.append({
                "bins": bins, "balls": balls, "reps": args.reps, "seed": args.seed,
                "exact_joint": joint, "exact_product": product, "exact_cov": exact_cov,
                "empirical_cov": est.value, "empirical_se": est.se, "z_score": z,
                "joint_le_product": joint <= product + 1e-12,
            })
    _emit(args, rows, NA_COLUMNS)
    if not all(r["joint_le_product"] and abs(r["z_score"]) <= 4.0 for r in rows):
        raise CheckFailed("negative-association check failed")


def cmd_oracle(args) -> None:
    if args.n_min > args.n_max:
        raise UsageError("--n-min exceeds --n-max")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        try:
            report = check_rule_equivalence(n, args.runs, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rows.append({"n": n, "runs": report.runs, "seed": args.seed,
                     "disagreements": report.disagreements, "max_steps": report.max_steps})
    _emit(args, rows, ("n", "runs", "seed", "disagreements", "max_steps"))
    total = sum(r["disagreements"] for r in rows)
    print(f"n={args.n_min}..{args.n_max}: {total} disagreements", file=sys.stderr)


def cmd_report(args) -> None:
    merged: dict[int, dict[str, str]] = {}
    columns = ["n"]
    for path in map(Path, args.paths):
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "n" not in reader.fieldnames:
                raise UsageError(f"{path} has no 'n' column")
            fresh = [f"{path.stem}.{c}" for c in reader.fieldnames if c != "n"]
            columns += fresh
            seen: set[int] = set()
            for row in reader:
                n = int(row["n"])
                if n in seen:
                    raise UsageError(f"{path} has more than one row for n={n}")
                seen.add(n)
                target = merged.setdefault(n, {"n": n})
                for c in reader.fieldnames:
                    if c != "n":
                        target[f"{path.stem}.{c}"] = row[c]
    rows = [merged[n] for n in sorted(merged)]
    _emit(args, rows, columns)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get(SEED_ENV)
    default_seed = int(env_seed) if env_seed else DEFAULT_SEED

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the table here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--reps", type=int, default=100_000, help="replicates (default %(default)s)")
    mc.add_argument("--seed", type=int, default=default_seed,
                    help=f"master seed (default %(default)s, or ${SEED_ENV})")
    mc.add_argument("--workers", type=int, default=1, help="threads; never changes output")

    parser = argparse.ArgumentParser(prog="labeled-ccp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", parents=[common], help="H_n and the leading-order expectations")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("exact", parents=[common], help="exact expectations from the (s, p) chain")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", parents=[common, mc], help="Monte Carlo stopping times")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--mode", choices=("labeled", "classic", "pair"), default="labeled")
    p.add_argument("--k", type=int, default=0, help="pre-collected coupons for classic/pair modes")
    p.add_argument("--records", help="per-run CSV dump path for labeled mode; '{n}' is substituted")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tails", parents=[common, mc], help="lower-tail frequencies against the bounds")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--modes", nargs="+", choices=TAIL_MODES, default=list(TAIL_MODES))
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("na", parents=[common, mc], help="negative association for two bins")
    p.add_argument("--bins", type=int, nargs="+", required=True)
    p.add_argument("--balls", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_na)

    p = sub.add_parser("oracle", parents=[common], help="component rule vs brute-force deduction")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=7)
    p.add_argument("--runs", type=int, default=500)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", parents=[common], help="join CSV tables on n")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CheckFailed, InvariantViolation, RuleMismatch) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
