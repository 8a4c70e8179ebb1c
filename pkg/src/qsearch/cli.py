"""Command-line front end.

Subcommands: tables, optimize, simulate, critical, parallel, verify.
Exit codes: 0 success, 2 usage error, 3 verification failure.
The Toffoli depth table can be overridden with --toffoli-table or the
QSEARCH_TOFFOLI_TABLE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .costs import CostModelError, DepthParams, GateDepthTable, sequence_depth, expected_depth
from .critical import critical_alpha
from .dynamics import block_success_probability, success_probability
from .optimize import (
    EnumerationBounds,
    optimize_grover,
    optimize_one_stage,
    optimize_two_stage,
    _plan_numbers,
)
from .parallel import plan_multistage_partition, plan_random_guess, plan_replicated
from .sequences import SequenceError, parse_paper_notation
from .statevector import (
    block_probability_full,
    default_target,
    success_probability_full,
)
from . import tables as tables_mod
from . import verify as verify_mod

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3


def _load_table(path: str | None, n_needed: int) -> GateDepthTable | None:
    path = path or os.environ.get("QSEARCH_TOFFOLI_TABLE")
    if path:
        return GateDepthTable.from_file(path)
    if n_needed > 10:
        return GateDepthTable.default(n_needed)
    return None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=1.0, help="oracle/diffusion depth ratio")
    parser.add_argument("--toffoli-table", help="CSV file `w,depth` overriding the built-in depths")
    parser.add_argument("--format", choices=("md", "csv", "json"), default="md")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsearch",
        description="Depth optimization of quantum search schedules",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tables = sub.add_parser("tables", help="reproduce the result tables and figure data")
    p_tables.add_argument("--n-min", type=int, default=4)
    p_tables.add_argument("--n-max", type=int, default=10)
    p_tables.add_argument(
        "--tables",
        default="grover,one-stage,two-stage,critical,fig2",
        help="comma list from grover,one-stage,two-stage,critical,fig2",
    )
    p_tables.add_argument("--tol", type=float, default=1e-3, help="critical-ratio tolerance")
    _add_common(p_tables)

    p_opt = sub.add_parser("optimize", help="optimize a schedule for one n")
    p_opt.add_argument("--n", type=int, required=True)
    p_opt.add_argument("--mode", choices=("grover", "one-stage", "two-stage"), default="one-stage")
    p_opt.add_argument("--max-blocks", type=int, default=None)
    _add_common(p_opt)

    p_sim = sub.add_parser("simulate", help="evaluate one schedule")
    p_sim.add_argument("--sequence", required=True, help="notation like S_{6,4}(1,1,2)")
    p_sim.add_argument("--target", default=None, help="target bit string (default all zeros)")
    p_sim.add_argument("--backend", choices=("reduced", "full"), default="reduced")
    _add_common(p_sim)

    p_crit = sub.add_parser("critical", help="critical oracle-to-diffusion ratio")
    p_crit.add_argument("--n", type=int, required=True)
    p_crit.add_argument("--mode", choices=("one-stage", "two-stage"), default="one-stage")
    p_crit.add_argument("--tol", type=float, default=1e-3)
    _add_common(p_crit)

    p_par = sub.add_parser("parallel", help="plan parallel execution on several machines")
    p_par.add_argument("--n", type=int, required=True)
    p_par.add_argument("--machines", type=int, default=1)
    p_par.add_argument("--strategy", choices=("replicated", "guess", "partition"), required=True)
    p_par.add_argument("--threshold", type=float, default=None)
    p_par.add_argument("--guess-bits", type=int, default=None)
    _add_common(p_par)

    p_ver = sub.add_parser("verify", help="run the self-check suites")
    p_ver.add_argument("--n-min", type=int, default=3)
    p_ver.add_argument("--n-max", type=int, default=10)
    p_ver.add_argument("--quick", action="store_true", help="smaller sampled suites")
    _add_common(p_ver)
    return parser


def _emit(table: tables_mod.Table, fmt: str) -> None:
    sys.stdout.write(tables_mod.render(table, fmt))
    if fmt != "json":
        sys.stdout.write("\n")


def cmd_tables(args) -> int:
    wanted = [t.strip() for t in args.tables.split(",") if t.strip()]
    n_range = range(args.n_min, args.n_max + 1)
    table = _load_table(args.toffoli_table, args.n_max)
    builders = {
        "grover": lambda: tables_mod.build_grover_table(n_range, args.alpha, table),
        "one-stage": lambda: tables_mod.build_one_stage_table(n_range, args.alpha, table),
        "two-stage": lambda: tables_mod.build_two_stage_table(n_range, args.alpha, table),
        "critical": lambda: tables_mod.build_critical_table(n_range, args.tol, table),
        "fig2": lambda: tables_mod.build_depth_figure_data(n_range, args.alpha, table),
    }
    unknown = [w for w in wanted if w not in builders]
    if unknown:
        raise CostModelError(f"unknown table(s): {', '.join(unknown)}")
    for name in wanted:
        _emit(builders[name](), args.format)
    return EXIT_OK


def cmd_optimize(args) -> int:
    table = _load_table(args.toffoli_table, args.n)
    params = DepthParams.make(args.n, args.alpha, table)
    bounds = None
    if args.max_blocks is not None:
        base = EnumerationBounds.default(args.n, args.alpha)
        bounds = EnumerationBounds(
            base.max_global, args.max_blocks, base.local_slack, base.local_ratio
        )
    if args.mode == "grover":
        result = optimize_grover(args.n, params)
    elif args.mode == "one-stage":
        result = optimize_one_stage(args.n, params, bounds)
    else:
        result = optimize_two_stage(args.n, params, bounds)
    if args.mode == "two-stage":
        plan = result.sequence
        p1, p2, d1, d2 = _plan_numbers(plan, params)
        out = tables_mod.Table(
            name="optimize",
            title=f"{args.mode} optimum (n={args.n}, alpha={args.alpha:g})",
            columns=(
                "n", "stage1_sequence", "stage2_sequence",
                "stage1_probability", "stage2_probability",
                "stage1_depth", "stage2_depth", "expected_depth",
            ),
            formats=("%d", "%s", "%s", "%.3f", "%.3f", "%.0f", "%.0f", "%.2f"),
            rows=[(args.n, str(plan.stage1), str(plan.stage2), p1, p2, d1, d2, result.expected_depth)],
        )
    else:
        out = tables_mod.Table(
            name="optimize",
            title=f"{args.mode} optimum (n={args.n}, alpha={args.alpha:g})",
            columns=("n", "sequence", "success_probability", "single_run_depth", "expected_depth"),
            formats=("%d", "%s", "%.3f", "%.0f", "%.2f"),
            rows=[(args.n, str(result.sequence), result.probability, result.single_run_depth, result.expected_depth)],
        )
    _emit(out, args.format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    seq = parse_paper_notation(args.sequence)
    table = _load_table(args.toffoli_table, seq.n)
    params = DepthParams.make(seq.n, args.alpha, table)
    target = args.target or default_target(seq.n)
    if args.backend == "full":
        p = success_probability_full(seq, target)
        p_block = block_probability_full(seq, target) if seq.m is not None else p
    else:
        p = success_probability(seq)
        p_block = block_success_probability(seq) if seq.m is not None else p
    breakdown = sequence_depth(seq, params)
    out = tables_mod.Table(
        name="simulate",
        title=f"{seq} on |s_{seq.n}> (backend={args.backend})",
        columns=(
            "sequence", "success_probability", "block_probability",
            "oracle_calls", "global_diffusions", "local_diffusions",
            "single_run_depth", "expected_depth",
        ),
        formats=("%s", "%.6f", "%.6f", "%d", "%d", "%d", "%.0f", "%.2f"),
        rows=[(
            str(seq), p, p_block,
            breakdown.oracle_calls, breakdown.global_diffusions, breakdown.local_diffusions,
            float(breakdown.total_depth), expected_depth(breakdown.total_depth, p),
        )],
    )
    _emit(out, args.format)
    return EXIT_OK


def cmd_critical(args) -> int:
    table = _load_table(args.toffoli_table, args.n)
    mode = args.mode.replace("-", "_")
    res = critical_alpha(args.n, mode, args.tol, table=table)
    witness_seq = ""
    if res.witness is not None:
        witness_seq = str(res.witness.sequence)
    out = tables_mod.Table(
        name="critical",
        title=f"critical ratio (n={args.n}, {args.mode})",
        columns=("n", "mode", "alpha_c", "tolerance", "witness_schedule"),
        formats=("%d", "%s", "%.3f", "%g", "%s"),
        rows=[(args.n, args.mode, res.alpha_c, args.tol, witness_seq)],
    )
    _emit(out, args.format)
    return EXIT_OK


def cmd_parallel(args) -> int:
    table = _load_table(args.toffoli_table, args.n)
    params = DepthParams.make(args.n, args.alpha, table)
    if args.strategy == "replicated":
        threshold = 0.5 if args.threshold is None else args.threshold
        plan = plan_replicated(args.n, params, args.machines, threshold)
    elif args.strategy == "guess":
        if args.guess_bits is None:
            raise CostModelError("--guess-bits is required for the guess strategy")
        plan = plan_random_guess(args.n, params, args.guess_bits, args.machines)
    else:
        plan = plan_multistage_partition(args.n, params, args.machines, args.threshold)
    per_machine = plan.per_machine
    if isinstance(per_machine, tuple):
        schedule = " ; ".join(str(s) for s in per_machine)
    else:
        schedule = str(per_machine)
    notes = []
    if plan.speedup_lost:
        notes.append("warning: more than half of the bits are guessed; quadratic speedup lost")
    if plan.dominated_by_guess:
        notes.append("note: one bit per machine; the random-guess one-bit search dominates")
    out = tables_mod.Table(
        name="parallel",
        title=f"{plan.strategy} plan (n={args.n}, machines={plan.machines})",
        columns=(
            "strategy", "machines", "schedule", "success_per_round",
            "expected_rounds", "single_run_depth", "notes",
        ),
        formats=("%s", "%d", "%s", "%.6f", "%.3f", "%.0f", "%s"),
        rows=[(
            plan.strategy, plan.machines, schedule, plan.success_per_round,
            plan.expected_rounds, plan.single_run_depth, "; ".join(notes),
        )],
    )
    _emit(out, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    table = _load_table(args.toffoli_table, args.n_max)
    failed = 0
    for name, passed, detail in verify_mod.run_checks(args.n_min, args.n_max, table, quick=args.quick):
        status = "PASS" if passed else "FAIL"
        print(f"{status}  {name}: {detail}")
        failed += not passed
    if failed:
        print(f"{failed} check(s) failed")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


_COMMANDS = {
    "tables": cmd_tables,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "critical": cmd_critical,
    "parallel": cmd_parallel,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CostModelError, SequenceError, ValueError) as exc:
        parser.exit(EXIT_USAGE, f"error: {exc}\n")
        return EXIT_USAGE  # unreachable; parser.exit raises SystemExit


if __name__ == "__main__":
    sys.exit(main())
