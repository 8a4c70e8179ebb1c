"""Schedule optimizers: Grover, one-stage, and two-stage minimal expected depth.

The one- and two-stage searches enumerate operator strings with the
branch-and-bound kernels in ``_kernels``; every reported winner is
re-evaluated at full precision through the reduced dynamics and the cost
model before tie-breaking.

Tie-breaking (documented contract): expected depths within a relative window
of 1e-9 count as equal; ties prefer fewer oracle calls, then fewer blocks,
then the lexicographically smaller block list (Global sorts before Local),
then the smaller local width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .costs import DepthParams, InfeasibleError, expected_depth, sequence_depth
from .dynamics import (
    Angles,
    block_success_probability,
    global_generator,
    grover_probability_closed_form,
    initial_state,
    j_max,
    success_probability,
)
from .sequences import Kind, SequenceSpec, TwoStagePlan

TIE_REL = 1e-9
_FRONTIER_CAP = 1 << 15
_TIE_CAP = 64


@dataclass(frozen=True)
class EnumerationBounds:
    """Search-space caps for the schedule enumeration.

    max_global caps the global-operator count at ⌊0.69·√N⌋; with j globals the
    local count is capped at ⌊(0.69·√N − j)·(α+1)/α⌋ (and by max_local_abs).
    max_blocks caps the number of alternating blocks.  max_run_local caps a
    single local block just below a full in-block rotation (longer blocks
    repeat an earlier state at strictly larger depth); None derives it from
    the local width.
    """

    max_global: int
    max_blocks: int
    local_slack: float
    local_ratio: float
    max_local_abs: int = 10**9
    max_run_local: int | None = None
    min_global: int = 1  # every table schedule keeps a global diffusion; 0 admits pure-local runs
    relax_blocks: bool = False  # lift the block cap to the automatic 2*max_global+1 limit

    def max_local_for(self, j: int) -> int:
        return min(self.max_local_abs, int((self.local_slack - j) * self.local_ratio))

    @classmethod
    def default(
        cls,
        n: int,
        alpha,
        *,
        min_global: int = 1,
        max_run_local: int | None = None,
        max_local_abs: int = 10**9,
        relax_blocks: bool = False,
    ) -> "EnumerationBounds":
        root = 2.0 ** (n / 2)
        a = float(alpha)
        max_global = int(0.69 * root)
        blocks = 2 * max_global + 1 if relax_blocks else 2 * n
        return cls(
            max_global=max_global,
            max_blocks=blocks,
            local_slack=0.69 * root,
            local_ratio=(a + 1.0) / a,
            max_local_abs=max_local_abs,
            max_run_local=max_run_local,
            min_global=min_global,
            relax_blocks=relax_blocks,
        )

    def rescaled(self, width: int, alpha_eff: float) -> "EnumerationBounds":
        """The same policy applied to a `width`-qubit stage with effective
        oracle/diffusion ratio `alpha_eff` (stage-2 of a two-stage plan)."""
        return EnumerationBounds.default(
            width,
            alpha_eff,
            min_global=self.min_global,
            max_run_local=self.max_run_local,
            max_local_abs=self.max_local_abs,
            relax_blocks=self.relax_blocks,
        )

    def for_critical_scan(self) -> "EnumerationBounds":
        """Critical-ratio scans admit pure-local schedules (Table 4's n=4
        one-stage value is the crossing of one); the block cap keeps the
        documented 2n default unless relax_blocks is set."""
        return EnumerationBounds(
            self.max_global,
            self.max_blocks,
            self.local_slack,
            self.local_ratio,
            self.max_local_abs,
            self.max_run_local,
            min_global=0,
            relax_blocks=self.relax_blocks,
        )


@dataclass(frozen=True)
class OptResult:
    sequence: SequenceSpec | TwoStagePlan
    probability: float
    single_run_depth: float
    expected_depth: float
    med_kind: str  # "grover" | "one_stage" | "two_stage"


class SearchError(RuntimeError):
    """Empty search space or kernel capacity exhausted."""


# ---------------------------------------------------------------------------
# pairing envelopes: min_i (a_i * d + b_i) as piecewise-linear breakpoints
# ---------------------------------------------------------------------------


def lower_envelope(slopes: np.ndarray, intercepts: np.ndarray):
    """Lower envelope of lines min_i (a_i·d + b_i).  Returns (x_start, a, b);
    piece k is active for d in [x_start[k], x_start[k+1])."""
    if len(slopes) == 0:
        raise SearchError("cannot build an envelope from zero lines")
    order = np.lexsort((intercepts, slopes))
    a = np.asarray(slopes, dtype=float)[order]
    b = np.asarray(intercepts, dtype=float)[order]
    keep = np.ones(len(a), dtype=bool)
    keep[1:] = a[1:] != a[:-1]  # equal slopes: lowest intercept wins
    a, b = a[keep], b[keep]
    # add steepest first; active pieces carry decreasing slopes as d grows
    hull: list[int] = []
    for i in range(len(a) - 1, -1, -1):
        while len(hull) >= 2:
            j, k = hull[-1], hull[-2]  # a[k] > a[j] > a[i]
            if (b[i] - b[k]) * (a[k] - a[j]) <= (b[j] - b[k]) * (a[k] - a[i]):
                hull.pop()  # j never realizes the minimum
            else:
                break
        hull.append(i)
    starts = [-np.inf]
    for k in range(1, len(hull)):
        i, j = hull[k], hull[k - 1]
        starts.append((b[i] - b[j]) / (a[j] - a[i]))
    return np.array(starts), a[hull], b[hull]


_TRIVIAL_ENV = (np.array([-np.inf]), np.array([1.0]), np.array([0.0]))


# ---------------------------------------------------------------------------
# kernel driver
# ---------------------------------------------------------------------------


@dataclass
class EnumerationRun:
    """Raw kernel output: incumbent/tie paths plus an optional frontier."""

    best_total: float
    candidate_ops: list[str]
    frontier: list[tuple[float, float, str]]  # (depth, prob, ops)
    nodes: int
    improved: bool


def _ops_from_row(row: np.ndarray, length: int) -> str:
    return "".join("G" if v == 0 else "L" for v in row[:length])


def _run_kernel(
    width_n: int,
    width_m: int,
    cost_g: float,
    cost_l: float,
    bounds: EnumerationBounds,
    objective: int,
    *,
    prob_cap: float = 2.0,
    prob_floor: float = -1.0,
    env=None,
    best_init: float = np.inf,
    depth_cap: float = np.inf,
    update_best: bool = True,
    stop_on_improve: bool = False,
    collect_frontier: bool = False,
) -> EnumerationRun:
    ang = Angles.for_widths(width_n, width_m)
    g_mat = np.ascontiguousarray(global_generator(width_n, width_m))
    loc_c = math.cos(2.0 * ang.theta2)
    loc_s = math.sin(2.0 * ang.theta2)
    state0 = initial_state(width_n, width_m).as_array()
    run_cap = bounds.max_run_local
    if run_cap is None:
        run_cap = max(1, math.ceil(math.pi / ang.theta2) - 1)

    per_block = max(bounds.max_global, run_cap)
    max_ops = bounds.max_global + min(
        bounds.max_local_abs, int(bounds.local_slack * bounds.local_ratio)
    )
    max_ops = min(max_ops, bounds.max_blocks * per_block)
    if math.isfinite(depth_cap):
        max_ops = min(max_ops, int(depth_cap / min(cost_g, cost_l)) + 1)
    if max_ops > 4096:
        raise SearchError(
            f"enumeration bounds admit strings of {max_ops} operators; tighten the bounds"
        )
    max_ops = max(max_ops, 1)

    env_x, env_a, env_b = env if env is not None else _TRIVIAL_ENV
    cap = _FRONTIER_CAP if collect_frontier else 1
    front_depth = np.empty(cap, dtype=np.float64)
    front_prob = np.empty(cap, dtype=np.float64)
    front_path = np.empty((cap, max_ops), dtype=np.uint8)
    front_len = np.empty(cap, dtype=np.int64)
    tie_path = np.empty((_TIE_CAP, max_ops), dtype=np.uint8)
    tie_len = np.empty(_TIE_CAP, dtype=np.int64)

    best_total, _bd, _bp, _bl, n_tied, front_count, nodes, overflow = _kernels.enumerate_schedules(
        g_mat,
        loc_c,
        loc_s,
        state0,
        float(cost_g),
        float(cost_l),
        bounds.max_global,
        bounds.max_local_abs,
        bounds.local_slack,
        bounds.local_ratio,
        bounds.max_blocks,
        run_cap,
        bounds.min_global,
        2.0 * ang.theta,
        2.0 * ang.theta2,
        2.0 * ang.gamma,
        objective,
        prob_cap,
        prob_floor,
        env_x,
        env_a,
        env_b,
        float(best_init),
        float(depth_cap),
        update_best,
        stop_on_improve,
        TIE_REL,
        collect_frontier,
        front_depth,
        front_prob,
        front_path,
        front_len,
        tie_path,
        tie_len,
        max_ops,
    )
    if overflow & 1:
        raise SearchError("frontier capacity exhausted; tighten depth bounds")
    candidates = [_ops_from_row(tie_path[i], tie_len[i]) for i in range(n_tied)]
    frontier = [
        (float(front_depth[i]), float(front_prob[i]), _ops_from_row(front_path[i], front_len[i]))
        for i in range(front_count)
    ]
    return EnumerationRun(best_total, candidates, frontier, int(nodes), best_total < best_init)


# ---------------------------------------------------------------------------
# tie-breaking
# ---------------------------------------------------------------------------

_KIND_RANK = {Kind.GLOBAL: 0, Kind.LOCAL: 1}


def _blocks_key(seq: SequenceSpec):
    return tuple((_KIND_RANK[k], c) for k, c in seq.blocks)


def _seq_tie_key(seq: SequenceSpec):
    oracles, _, _ = seq.operator_counts()
    return (oracles, len(seq.blocks), _blocks_key(seq), seq.m if seq.m is not None else 0)


def _plan_tie_key(plan: TwoStagePlan):
    o1, _, _ = plan.stage1.operator_counts()
    o2, _, _ = plan.stage2.operator_counts()
    blocks = len(plan.stage1.blocks) + len(plan.stage2.blocks)
    return (
        o1 + o2,
        blocks,
        _blocks_key(plan.stage1),
        _blocks_key(plan.stage2),
        plan.m2,
        plan.m_prime if plan.m_prime is not None else 0,
    )


def _pick_best(entries):
    """entries: (expected, tie_key, payload).  Smallest expected wins; ties by key."""
    if not entries:
        raise SearchError("no feasible schedule found")
    best_exp = min(e[0] for e in entries)
    window = TIE_REL * (1.0 + abs(best_exp))
    tied = [e for e in entries if e[0] <= best_exp + window]
    tied.sort(key=lambda e: (e[1], e[0]))
    return tied[0]


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------


def optimize_grover(n: int, params: DepthParams) -> OptResult:
    """Minimize j·(α+1)·d(D_n) / P_n(j) over the iteration count j."""
    if n < 2:
        raise SearchError("optimize_grover needs n >= 2")
    d_n = params.table.diffusion_depth(n)
    cost = float(params.alpha * d_n + d_n)
    best = None
    for j in range(1, j_max(n) + 2):
        p = grover_probability_closed_form(n, j)
        exp = j * cost / p
        if best is None or exp < best[0] * (1.0 - 1e-15):
            best = (exp, j, p)
    exp, j, p = best
    seq = SequenceSpec.pure_grover(n, j)
    return OptResult(seq, p, float(j * cost), exp, "grover")


def grover_med(n: int, params: DepthParams) -> float:
    return optimize_grover(n, params).expected_depth


def _one_stage_entries(
    n: int,
    params: DepthParams,
    bounds: EnumerationBounds | None,
    *,
    best_init: float,
    stop_on_improve: bool = False,
) -> tuple[list, bool]:
    """Enumerate all local widths; returns (candidate entries, improved_flag)."""
    d_n = params.table.diffusion_depth(n)
    alpha = float(params.alpha)
    entries = []
    improved = False
    bound = best_init
    widths = sorted(range(2, n), key=lambda m: (abs(m - (n + 1) / 2), m))
    for m in widths:
        b = bounds if bounds is not None else EnumerationBounds.default(n, params.alpha)
        run = _run_kernel(
            n,
            m,
            alpha * d_n + d_n,
            alpha * d_n + params.table.diffusion_depth(m),
            b,
            _kernels.OBJ_SUCCESS,
            best_init=bound,
            stop_on_improve=stop_on_improve,
        )
        improved |= run.improved
        for ops in run.candidate_ops:
            seq = SequenceSpec.from_ops(n, m, ops)
            p = success_probability(seq)
            depth = float(sequence_depth(seq, params).total_depth)
            exp = expected_depth(depth, p)
            entries.append((exp, _seq_tie_key(seq), (seq, p, depth)))
            bound = min(bound, exp * (1.0 + TIE_REL))
        if stop_on_improve and improved:
            break
    return entries, improved


def optimize_one_stage(
    n: int, params: DepthParams, bounds: EnumerationBounds | None = None
) -> OptResult:
    """Exhaustive bounded search over m and alternating schedules; d_1 <= d_G."""
    if n < 3:
        raise SearchError("optimize_one_stage needs n >= 3")
    gro = optimize_grover(n, params)
    entries = [
        (gro.expected_depth, _seq_tie_key(gro.sequence), (gro.sequence, gro.probability, gro.single_run_depth))
    ]
    more, _ = _one_stage_entries(
        n, params, bounds, best_init=gro.expected_depth * (1.0 + TIE_REL)
    )
    entries.extend(more)
    exp, _, (seq, p, depth) = _pick_best(entries)
    return OptResult(seq, p, depth, exp, "one_stage")


# -- two-stage ---------------------------------------------------------------


def _stage2_pure_grover_points(m2: int, oracle: float, d_m2: int) -> list[tuple[float, float, str]]:
    pts = []
    for j in range(1, j_max(m2) + 2):
        p = grover_probability_closed_form(m2, j)
        pts.append((j * (oracle + d_m2), p, "G" * j))
    return pts


def _pareto(points: Iterable[tuple[float, float, object]]):
    """Pareto staircase (min depth, max prob) of (depth, prob, payload) points."""
    out = []
    for d, p, payload in sorted(points, key=lambda t: (t[0], -t[1])):
        if not out or p > out[-1][1]:
            out.append((d, p, payload))
    return out


def _theorem2_stage1_family(n: int, m2: int, jg_cap: int, run_cap: int):
    """Seed schedules (L^a G)^k: the Theorem-2 witness family and relatives."""
    g_mat = global_generator(n, m2)
    ang = Angles.for_widths(n, m2)
    fams = []
    for a in range(0, min(run_cap, 6) + 1):
        loc = np.array(
            [
                [math.cos(2 * a * ang.theta2), math.sin(2 * a * ang.theta2), 0.0],
                [-math.sin(2 * a * ang.theta2), math.cos(2 * a * ang.theta2), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        step = g_mat @ loc
        vec = initial_state(n, m2).as_array()
        for k in range(1, jg_cap + 1):
            vec = step @ vec
            p_block = vec[0] ** 2 + vec[1] ** 2
            fams.append((a, k, p_block))
    return fams


def _two_stage_seed(n: int, m2: int, params: DepthParams, bounds: EnumerationBounds):
    """Cheap feasible plans for one split: (expected, plan_parts) or None."""
    d_n = params.table.diffusion_depth(n)
    d_m2 = params.table.diffusion_depth(m2)
    alpha = float(params.alpha)
    oracle = alpha * d_n
    ang = Angles.for_widths(n, m2)
    run_cap = bounds.max_run_local or max(1, math.ceil(math.pi / ang.theta2) - 1)

    stage2 = min(
        _stage2_pure_grover_points(m2, oracle, d_m2), key=lambda t: t[0] / t[1] if t[1] > 0 else np.inf
    )
    d2, p2, ops2 = stage2
    best = None
    for a, k, p1 in _theorem2_stage1_family(n, m2, bounds.max_global, run_cap):
        if p1 <= 0:
            continue
        blocks = 2 * k if a else 1
        if k > bounds.max_global or a * k > bounds.max_local_for(k) or blocks > bounds.max_blocks:
            continue
        d1 = k * (oracle + d_n) + a * k * (oracle + d_m2)
        exp = (d1 + d2) / (p1 * p2)
        if best is None or exp < best[0]:
            best = (exp, ("L" * a + "G") * k, ops2)
    # pure-global stage 1 as a fallback seed
    for j in range(1, bounds.max_global + 1):
        seq = SequenceSpec.pure_grover(n, j)
        p1 = block_success_probability(seq, m=m2)
        d1 = j * (oracle + d_n)
        exp = (d1 + d2) / (p1 * p2)
        if best is None or exp < best[0]:
            best = (exp, "G" * j, ops2)
    return best


def _make_plan(n: int, m2: int, m_prime: int | None, ops1: str, ops2: str) -> TwoStagePlan:
    stage1 = SequenceSpec.from_ops(n, m2 if "L" in ops1 else None, ops1)
    stage2 = SequenceSpec.from_ops(m2, m_prime if "L" in ops2 else None, ops2)
    return TwoStagePlan(n - m2, m2, m_prime if "L" in ops2 else None, stage1, stage2)


def _plan_numbers(plan: TwoStagePlan, params: DepthParams):
    """Exact (p1, p2, d1, d2) for a plan under the cost model."""
    n, m2 = plan.n, plan.m2
    d_n = params.table.diffusion_depth(n)
    d_m2 = params.table.diffusion_depth(m2)
    oracle = params.alpha * d_n
    o1, g1, l1 = plan.stage1.operator_counts()
    d1 = o1 * oracle + g1 * d_n + l1 * (d_m2 if l1 else 0)
    o2, g2, l2 = plan.stage2.operator_counts()
    d_mp = params.table.diffusion_depth(plan.m_prime) if plan.m_prime is not None else 0
    d2 = o2 * oracle + g2 * d_m2 + l2 * d_mp
    if plan.m1 == 0:
        p1 = 1.0 if not plan.stage1.blocks else block_success_probability(plan.stage1, m=m2)
    elif not plan.stage1.blocks:
        p1 = 2.0**-plan.m1  # empty stage 1: uniform guess of the address bits
    else:
        p1 = block_success_probability(plan.stage1, m=m2)
    p2 = success_probability(plan.stage2)
    return p1, p2, float(d1), float(d2)


def evaluate_plan(plan: TwoStagePlan, params: DepthParams) -> OptResult:
    """Exact evaluation of a user-supplied two-stage plan (no optimization)."""
    if plan.n != params.n:
        raise InfeasibleError(f"plan width {plan.n} != params width {params.n}")
    p1, p2, d1, d2 = _plan_numbers(plan, params)
    prob = p1 * p2
    total = d1 + d2
    return OptResult(plan, prob, total, expected_depth(total, prob), "two_stage")


def optimize_two_stage(
    n: int, params: DepthParams, bounds: EnumerationBounds | None = None
) -> OptResult:
    """Joint search over the bit split m2, stage-1 schedules scored by block
    probability, and stage-2 schedules scored by success probability."""
    if n < 4:
        raise SearchError("optimize_two_stage needs n >= 4")
    entries = _two_stage_entries(n, params, bounds, best_init=np.inf)
    exp, _, plan = _pick_best(entries)
    p1, p2, d1, d2 = _plan_numbers(plan, params)
    return OptResult(plan, p1 * p2, d1 + d2, exp, "two_stage")


def _two_stage_entries(
    n: int,
    params: DepthParams,
    bounds: EnumerationBounds | None,
    *,
    best_init: float,
    stop_on_improve: bool = False,
):
    d_n = params.table.diffusion_depth(n)
    alpha = float(params.alpha)
    oracle = alpha * d_n
    entries = []

    def add_entry(m2, m_prime, ops1, ops2, bound):
        plan = _make_plan(n, m2, m_prime, ops1, ops2)
        p1, p2, d1, d2 = _plan_numbers(plan, params)
        if p1 <= 0 or p2 <= 0:
            return bound
        exp = (d1 + d2) / (p1 * p2)
        entries.append((exp, _plan_tie_key(plan), plan))
        return min(bound, exp * (1.0 + TIE_REL))

    # seeds: cheap feasible plans fix the initial bound for every split
    seeds = {}
    bound = best_init
    for m2 in range(2, n):
        b = _bounds_for(bounds, n, params)
        seed = _two_stage_seed(n, m2, params, b)
        if seed is not None:
            seeds[m2] = seed[0]
            bound = add_entry(m2, None, seed[1], seed[2], bound)
    if stop_on_improve and bound < best_init:
        return entries

    for m2 in sorted(range(2, n), key=lambda m: seeds.get(m, np.inf)):
        d_m2 = params.table.diffusion_depth(m2)
        # ---- stage-2 frontier over pure Grover and every inner width -----
        points = [(d, p, (None, ops)) for d, p, ops in _stage2_pure_grover_points(m2, oracle, d_m2)]
        for m_prime in range(2, m2):
            b2 = _bounds_for(bounds, m2, params, oracle_cost=oracle, d_glob=d_m2)
            run2 = _run_kernel(
                m2,
                m_prime,
                oracle + d_m2,
                oracle + params.table.diffusion_depth(m_prime),
                b2,
                _kernels.OBJ_SUCCESS,
                best_init=bound,
                depth_cap=bound,
                update_best=False,
                collect_frontier=True,
            )
            points.extend((d, p, (m_prime, ops)) for d, p, ops in run2.frontier)
        frontier = [(d, p, tag) for d, p, tag in _pareto(points) if d < bound]
        if not frontier:
            continue

        # ---- stage-1 search paired against the stage-2 envelope ----------
        depths = np.array([d for d, _, _ in frontier])
        probs = np.array([p for _, p, _ in frontier])
        env = lower_envelope(1.0 / probs, depths / probs)
        b1 = _bounds_for(bounds, n, params)
        run1 = _run_kernel(
            n,
            m2,
            oracle + d_n,
            oracle + d_m2,
            b1,
            _kernels.OBJ_BLOCK,
            env=env,
            best_init=bound,
            stop_on_improve=stop_on_improve,
        )
        for ops1 in run1.candidate_ops:
            seq1 = SequenceSpec.from_ops(n, m2, ops1)
            p1 = block_success_probability(seq1, m=m2)
            bd1 = ops1.count("G") * (oracle + d_n) + ops1.count("L") * (oracle + d_m2)
            if p1 <= 0:
                continue
            # best stage-2 partner for this stage-1 candidate
            pair_exp = (bd1 + depths) / (p1 * probs)
            for idx in np.argsort(pair_exp)[:8]:
                m_prime, ops2 = frontier[idx][2]
                bound = add_entry(m2, m_prime, ops1, ops2, bound)
        if stop_on_improve and bound < best_init:
            break
    return entries


def _bounds_for(
    bounds: EnumerationBounds | None,
    width: int,
    params: DepthParams,
    *,
    oracle_cost: float | None = None,
    d_glob: float | None = None,
) -> EnumerationBounds:
    """Bounds for an enumeration over `width` qubits; stage-2 runs use the
    effective oracle/diffusion ratio of the rescaled stage.  Explicit bounds
    apply as-is at the plan width and as a policy for rescaled stages."""
    if oracle_cost is None:
        if bounds is not None:
            return bounds
        return EnumerationBounds.default(width, params.alpha)
    alpha_eff = oracle_cost / d_glob
    if bounds is not None:
        return bounds.rescaled(width, alpha_eff)
    return EnumerationBounds.default(width, alpha_eff)
