"""Self-check engine behind the `verify` CLI subcommand.

Runs the oracle-equivalence suite (reduced 3-amplitude model against the full
statevector), the theorem diagnostics, and the golden-table comparisons.
Each check yields (name, passed, detail); the CLI exits nonzero when any
check fails.
"""

from __future__ import annotations

import math
import random
from typing import Iterator

import numpy as np

from .costs import DepthParams, GateDepthTable
from .critical import sandwich_matrix, sandwich_product, theorem2_closed_form, theorem2_product
from .dynamics import (
    block_success_probability,
    grover_probability_closed_form,
    j_max,
    success_probability,
)
from .optimize import optimize_grover
from .sequences import SequenceSpec
from .statevector import (
    amplitude_classes,
    block_probability_full,
    run_sequence_full,
    success_probability_full,
)

# Printed values of the alpha=1 Grover table (sequence, probability, depth, MED).
GROVER_GOLDEN = {
    4: ("S_4(1,0)", 0.473, 30, 63.47),
    5: ("S_5(2,0)", 0.602, 124, 205.83),
    6: ("S_6(4,0)", 0.816, 504, 617.36),
    7: ("S_7(6,0)", 0.833, 1464, 1756.35),
    8: ("S_8(9,0)", 0.861, 2916, 3388.03),
    9: ("S_9(12,0)", 0.798, 4848, 6071.76),
    10: ("S_10(18,0)", 0.838, 8712, 10397.28),
}


def random_sequences(n: int, m: int, count: int, max_oracles: int, seed: int) -> Iterator[SequenceSpec]:
    rng = random.Random(seed)
    for _ in range(count):
        length = rng.randint(1, max_oracles)
        ops = "".join(rng.choice("GL") for _ in range(length))
        yield SequenceSpec.from_ops(n, m, ops)


def check_oracle_equivalence(n_min=3, n_max=10, count=200, max_oracles=20, seed=20240901):
    """Reduced-model success/block probabilities match statevector marginals to
    1e-10; full-state amplitudes stay equal within their three classes to 1e-12."""
    worst = 0.0
    worst_cls = 0.0
    for n in range(n_min, n_max + 1):
        for m in range(2, n):
            for seq in random_sequences(n, m, count, max_oracles, seed + 97 * n + m):
                p_red = success_probability(seq)
                b_red = block_success_probability(seq)
                state = run_sequence_full(seq)
                t = "0" * n
                p_full = float(state[0] ** 2)
                b_full = float((state[: 2**m] ** 2).sum())
                worst = max(worst, abs(p_red - p_full), abs(b_red - b_full))
                for cls in amplitude_classes(state, t, m)[1:]:
                    if len(cls):
                        worst_cls = max(worst_cls, float(np.ptp(cls)))
    ok = worst <= 1e-10 and worst_cls <= 1e-12
    return ok, f"max probability gap {worst:.2e}, max class spread {worst_cls:.2e}"


def check_closed_form(n_max=12):
    """Matrix-product Grover probabilities equal sin^2((2j+1)theta) to 1e-10."""
    worst = 0.0
    for n in range(2, n_max + 1):
        seq_m = n - 1 if n > 2 else None
        for j in range(0, j_max(n) + 1):
            closed = grover_probability_closed_form(n, j)
            if j == 0:
                sim = 2.0**-n
            else:
                seq = SequenceSpec.pure_grover(n, j)
                from .dynamics import apply_sequence

                sim = apply_sequence(seq, m=seq_m).a_t ** 2
            worst = max(worst, abs(closed - sim))
    return worst <= 1e-10, f"max abs error {worst:.2e}"


def check_theorem_diagnostics(n_min=4, n_max=14):
    """Sandwich-matrix eigen structure and the closed forms vs generator products."""
    worst = 0.0
    for n in range(n_min, n_max + 1):
        diag = sandwich_matrix(n)
        lam0, lamp, lamm = diag.eigenvalues
        worst = max(
            worst,
            abs(lam0 + 1.0),
            abs(abs(lamp) - 1.0),
            abs(abs(lamm) - 1.0),
            diag.target_overlap_v0,
            abs(diag.target_overlap_vpm - 0.5),
            diag.product_error,
            float(np.abs(theorem2_closed_form(n) - theorem2_product(n)).max()),
        )
    return worst <= 1e-10, f"max deviation {worst:.2e}"


def check_grover_golden(table: GateDepthTable | None = None, n_min=4, n_max=10):
    """Grover optimizer against the printed alpha=1 table."""
    for n in range(max(4, n_min), min(10, n_max) + 1):
        seq_str, p, depth, med = GROVER_GOLDEN[n]
        r = optimize_grover(n, DepthParams.make(n, 1, table))
        if (
            str(r.sequence) != seq_str
            or abs(r.probability - p) > 1e-3
            or r.single_run_depth != depth
            or abs(r.expected_depth - med) > 0.02
        ):
            return False, f"n={n}: got {r.sequence} p={r.probability:.4f} d={r.single_run_depth} med={r.expected_depth:.2f}"
    return True, "all rows match"


def run_checks(n_min=3, n_max=10, table: GateDepthTable | None = None, quick=False):
    """Yield (name, passed, detail) for every verification check."""
    count = 40 if quick else 200
    yield ("grover-golden-table", *check_grover_golden(table, n_min, n_max))
    yield ("oracle-equivalence", *check_oracle_equivalence(n_min, n_max, count=count))
    yield ("closed-form-grover", *check_closed_form(min(12, max(8, n_max + 2))))
    yield ("theorem-diagnostics", *check_theorem_diagnostics(4, max(14, n_max)))
