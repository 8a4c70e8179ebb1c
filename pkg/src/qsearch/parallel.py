"""Planners for running the search on several machines in parallel.

Three strategies: replicate a deliberately low-probability schedule and race,
fix random guesses for part of the address and search the rest, or partition
the address so each machine reveals one part near-deterministically.
Machines are modeled as identical and lock-step; one round is one schedule
execution, and rounds repeat until the classical verifier accepts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .costs import DepthParams, sequence_depth
from .dynamics import Angles, global_generator, initial_state
from .optimize import (
    EnumerationBounds,
    OptResult,
    SearchError,
    _pick_best,
    _run_kernel,
    _seq_tie_key,
    optimize_grover,
    optimize_one_stage,
)
from .sequences import SequenceSpec


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class ParallelPlan:
    strategy: str  # "replicated" | "random_guess" | "multistage_partition"
    machines: int
    per_machine: SequenceSpec | tuple[SequenceSpec, ...]
    success_per_round: float  # joint probability that a round yields the target
    expected_rounds: float
    single_run_depth: float
    speedup_lost: bool = False  # random guess with more than half the bits guessed
    dominated_by_guess: bool = False  # partition into single bits


def plan_replicated(
    n: int,
    params: DepthParams,
    machines: int,
    prob_threshold: float,
    bounds: EnumerationBounds | None = None,
) -> ParallelPlan:
    """MED schedule among those with success probability <= prob_threshold,
    replicated on every machine; a round succeeds if any machine does."""
    if machines < 1:
        raise PlanError("need at least one machine")
    if not 0.0 < prob_threshold <= 1.0:
        raise PlanError(f"prob_threshold must be in (0, 1], got {prob_threshold}")
    d_n = params.table.diffusion_depth(n)
    alpha = float(params.alpha)
    entries = []
    gro = optimize_grover(n, params)
    if gro.probability <= prob_threshold:
        entries.append((gro.expected_depth, _seq_tie_key(gro.sequence), (gro.sequence, gro.probability, gro.single_run_depth)))
    # pure-Grover schedules under the cap
    from .dynamics import grover_probability_closed_form, j_max

    for j in range(1, j_max(n) + 2):
        p = grover_probability_closed_form(n, j)
        if p <= prob_threshold:
            seq = SequenceSpec.pure_grover(n, j)
            depth = float(sequence_depth(seq, params).total_depth)
            entries.append((depth / p, _seq_tie_key(seq), (seq, p, depth)))
    bound = min((e[0] for e in entries), default=np.inf) * (1.0 + 1e-9)
    for m in range(2, n):
        b = bounds if bounds is not None else EnumerationBounds.default(n, params.alpha)
        run = _run_kernel(
            n,
            m,
            alpha * d_n + d_n,
            alpha * d_n + params.table.diffusion_depth(m),
            b,
            _kernels.OBJ_SUCCESS,
            prob_cap=prob_threshold,
            best_init=bound,
        )
        for ops in run.candidate_ops:
            seq = SequenceSpec.from_ops(n, m, ops)
            from .dynamics import success_probability

            p = success_probability(seq)
            if p > prob_threshold:
                continue
            depth = float(sequence_depth(seq, params).total_depth)
            entries.append((depth / p, _seq_tie_key(seq), (seq, p, depth)))
            bound = min(bound, depth / p * (1.0 + 1e-9))
    if not entries:
        raise PlanError(f"no schedule with success probability <= {prob_threshold}")
    _, _, (seq, p, depth) = _pick_best(entries)
    joint = 1.0 - (1.0 - p) ** machines
    return ParallelPlan(
        strategy="replicated",
        machines=machines,
        per_machine=seq,
        success_per_round=joint,
        expected_rounds=1.0 / joint,
        single_run_depth=depth,
    )


def plan_random_guess(
    n: int, params: DepthParams, guess_bits: int, machines: int | None = None
) -> ParallelPlan:
    """Each machine fixes a distinct guess for `guess_bits` address bits and
    runs the optimal search on the remaining n-g qubits."""
    g = guess_bits
    if not 1 <= g < n:
        raise PlanError(f"guess_bits must be in [1, {n - 1}], got {g}")
    rest = n - g
    if machines is None:
        machines = 2**g
    if machines < 1:
        raise PlanError("need at least one machine")
    sub_params = DepthParams.make(rest, params.alpha, params.table)
    if rest == 2:
        sub = optimize_grover(rest, sub_params)  # one Grover operator is exact
    else:
        sub = optimize_one_stage(rest, sub_params)
    covered = min(machines, 2**g)
    joint = covered / 2.0**g * sub.probability
    return ParallelPlan(
        strategy="random_guess",
        machines=machines,
        per_machine=sub.sequence,
        success_per_round=joint,
        expected_rounds=1.0 / joint,
        single_run_depth=sub.single_run_depth,
        speedup_lost=g > n / 2,
    )


def plan_multistage_partition(
    n: int,
    params: DepthParams,
    machines: int,
    prob_threshold: float | None = None,
    bounds: EnumerationBounds | None = None,
) -> ParallelPlan:
    """Split the address into `machines` equal parts; machine k reveals part k
    with block probability >= prob_threshold, maximizing the local-operator
    count (ties by lowest depth).  Joint success is the product over parts."""
    p_machines = machines
    if p_machines < 1 or n % p_machines != 0:
        raise PlanError(f"machine count {p_machines} must divide n={n}")
    if prob_threshold is None:
        prob_threshold = 1.0 - 2.0 ** (-n / 2)
    if not 0.0 < prob_threshold <= 1.0:
        raise PlanError(f"prob_threshold must be in (0, 1], got {prob_threshold}")
    part = n // p_machines
    if p_machines == 1:
        # degenerate: a single one-stage search revealing everything
        res = optimize_one_stage(n, params) if n >= 3 else optimize_grover(n, params)
        return ParallelPlan(
            strategy="multistage_partition",
            machines=1,
            per_machine=res.sequence,
            success_per_round=res.probability,
            expected_rounds=1.0 / res.probability,
            single_run_depth=res.single_run_depth,
        )
    m = n - part  # local width: everything except the revealed part
    if m < 2:
        raise PlanError(f"part length {part} leaves local width {m} < 2")
    b = bounds if bounds is not None else EnumerationBounds.default(n, params.alpha)
    ang = Angles.for_widths(n, m)
    run_cap = b.max_run_local or max(1, math.ceil(math.pi / ang.theta2) - 1)
    d_n = params.table.diffusion_depth(n)
    alpha = float(params.alpha)
    max_ops = min(b.max_global + int(b.local_slack * b.local_ratio), b.max_blocks * max(b.max_global, run_cap), 4096)
    best_path = np.empty(max_ops, dtype=np.uint8)
    locals_found, depth, prob, length, _nodes = _kernels.max_locals_schedule(
        np.ascontiguousarray(global_generator(n, m)),
        math.cos(2 * ang.theta2),
        math.sin(2 * ang.theta2),
        initial_state(n, m).as_array(),
        alpha * d_n + d_n,
        alpha * d_n + params.table.diffusion_depth(m),
        b.max_global,
        b.max_local_abs,
        b.local_slack,
        b.local_ratio,
        b.max_blocks,
        run_cap,
        2.0 * ang.gamma,
        prob_threshold,
        best_path,
        max_ops,
    )
    if locals_found < 0:
        raise SearchError(
            f"no schedule reaches block probability {prob_threshold} within bounds"
        )
    ops = "".join("G" if v == 0 else "L" for v in best_path[:length])
    seq = SequenceSpec.from_ops(n, m, ops)
    # by symmetry every part runs the same abstract schedule on its own qubits
    joint = prob**p_machines
    return ParallelPlan(
        strategy="multistage_partition",
        machines=p_machines,
        per_machine=tuple(seq for _ in range(p_machines)),
        success_per_round=joint,
        expected_rounds=1.0 / joint,
        single_run_depth=float(sequence_depth(seq, params).total_depth),
        dominated_by_guess=p_machines == n,
    )
