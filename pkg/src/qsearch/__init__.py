"""Depth optimization of quantum search schedules built from global and local
diffusion operators: exact reduced-subspace simulation, schedule optimizers,
critical oracle-to-diffusion ratios, and parallel-running planners."""

from .costs import (
    CostModelError,
    DepthBreakdown,
    DepthParams,
    GateDepthTable,
    InfeasibleError,
    diffusion_depth,
    expected_depth,
    oracle_depth,
    sequence_depth,
)
from .dynamics import (
    Angles,
    ReducedState,
    apply_sequence,
    block_success_probability,
    global_generator,
    grover_probability_closed_form,
    initial_state,
    local_generator,
    success_probability,
)
from .optimize import (
    EnumerationBounds,
    OptResult,
    SearchError,
    evaluate_plan,
    optimize_grover,
    optimize_one_stage,
    optimize_two_stage,
)
from .sequences import (
    Kind,
    SequenceSpec,
    SequenceError,
    TwoStagePlan,
    format_paper_notation,
    parse_paper_notation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
