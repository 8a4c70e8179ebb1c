"""Critical oracle-to-diffusion ratios and the theorem constructions.

alpha_c,k is the largest alpha at which the k-stage optimized schedule still
beats Grover's minimal expected depth.  Both MEDs are lower envelopes of
functions affine in alpha, so the beat-region boundary is found by bisection
on the predicate d_k(alpha) < d_G(alpha).  Winners discovered at any probe
are cached as (slope, intercept) witness lines, giving later probes an O(1)
certificate before any re-enumeration.

The search domain starts at the paper's practical floor alpha >= 1; Table 4's
"NA" entries mean no ratio at or above the floor satisfies the predicate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .costs import DepthParams, GateDepthTable
from .dynamics import Angles, global_generator, initial_state, local_generator
from .optimize import (
    EnumerationBounds,
    OptResult,
    _one_stage_entries,
    _two_stage_entries,
    _pick_best,
    grover_med,
    optimize_grover,
    optimize_one_stage,
    optimize_two_stage,
)
from .sequences import SequenceSpec, TwoStagePlan

STRICT_REL = 1e-12  # d_k must undercut d_G by more than float noise
EIG_TOL = 1e-10
ALPHA_C2_LIMIT = 1.0 + math.sqrt(3.0)


class CriticalRatioError(RuntimeError):
    pass


@dataclass(frozen=True)
class CriticalResult:
    alpha_c: float | None  # None = ABSENT: Grover is depth-optimal on the whole domain
    witness: OptResult | None
    tolerance: float
    mode: str
    n: int
    predicate_below: bool | None = None  # d_k < d_G at alpha_c - tol
    predicate_above: bool | None = None  # d_k >= d_G at alpha_c + tol

    @property
    def absent(self) -> bool:
        return self.alpha_c is None


def _mode_entries(n, params, bounds, mode, *, best_init, stop_on_improve):
    if mode == "one_stage":
        entries, _ = _one_stage_entries(
            n, params, bounds, best_init=best_init, stop_on_improve=stop_on_improve
        )
        return entries
    return _two_stage_entries(
        n, params, bounds, best_init=best_init, stop_on_improve=stop_on_improve
    )


def _witness_line(entry, params: DepthParams, mode: str) -> tuple[float, float]:
    """Expected depth of a schedule as slope*alpha + intercept."""
    d_n = params.table.diffusion_depth(params.n)
    _, _, payload = entry
    if mode == "one_stage":
        seq, p, _ = payload
        oracles, n_glob, n_loc = seq.operator_counts()
        fixed = n_glob * d_n + (n_loc * params.table.diffusion_depth(seq.m) if n_loc else 0)
        return oracles * d_n / p, fixed / p
    plan = payload
    o1, g1, l1 = plan.stage1.operator_counts()
    o2, g2, l2 = plan.stage2.operator_counts()
    d_m2 = params.table.diffusion_depth(plan.m2)
    d_mp = params.table.diffusion_depth(plan.m_prime) if plan.m_prime is not None else 0
    fixed = g1 * d_n + l1 * d_m2 + g2 * d_m2 + l2 * d_mp
    from .optimize import _plan_numbers

    p1, p2, _, _ = _plan_numbers(plan, params)
    p = p1 * p2
    return (o1 + o2) * d_n / p, fixed / p


def critical_alpha(
    n: int,
    mode: str,
    tol: float = 1e-3,
    *,
    table: GateDepthTable | None = None,
    alpha_floor: float = 1.0,
    alpha_cap: float = 2.0**20,
    max_iter: int = 200,
) -> CriticalResult:
    """Bisection for alpha_c,1 / alpha_c,2 with doubling upper probes."""
    if mode not in ("one_stage", "two_stage"):
        raise CriticalRatioError(f"unknown mode {mode!r}")
    if mode == "one_stage" and n < 3 or mode == "two_stage" and n < 4:
        raise CriticalRatioError(f"n={n} too small for {mode}")
    if tol <= 0:
        raise CriticalRatioError("tol must be positive")
    witness_lines: list[tuple[float, float]] = []

    def predicate(alpha: float) -> bool:
        params = DepthParams.make(n, alpha, table)
        cutoff = grover_med(n, params) * (1.0 - STRICT_REL)
        if any(a * alpha + b < cutoff for a, b in witness_lines):
            return True
        bounds = EnumerationBounds.default(n, alpha).for_critical_scan()
        entries = _mode_entries(
            n, params, bounds, mode, best_init=cutoff, stop_on_improve=True
        )
        winners = [e for e in entries if e[0] < cutoff]
        if not winners:
            return False
        witness_lines.append(_witness_line(min(winners), params, mode))
        return True

    lo = alpha_floor
    if not predicate(lo):
        return CriticalResult(None, None, tol, mode, n)
    hi = 2.0 * lo
    iters = 0
    while predicate(hi):
        lo = hi
        hi *= 2.0
        iters += 1
        if hi > alpha_cap or iters > max_iter:
            raise CriticalRatioError(f"no upper crossing found below alpha={alpha_cap}")
    while hi - lo > tol and iters < max_iter:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
        iters += 1
    alpha_c = 0.5 * (lo + hi)

    below = max(alpha_floor, alpha_c - tol)
    params_below = DepthParams.make(n, below, table)
    optimizer = optimize_one_stage if mode == "one_stage" else optimize_two_stage
    bounds = EnumerationBounds.default(n, below).for_critical_scan()
    witness = optimizer(n, params_below, bounds)
    return CriticalResult(
        alpha_c,
        witness,
        tol,
        mode,
        n,
        predicate_below=predicate(below),
        predicate_above=not predicate(alpha_c + tol),
    )


# ---------------------------------------------------------------------------
# Theorem 1: the sandwich sequence S_{n,n-1}(1,1,1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremDiagnostics:
    matrix: np.ndarray
    eigenvalues: tuple[complex, complex, complex]  # (lambda0, lambda+, lambda-)
    rotation_angle: float  # exact angle of lambda+
    delta_gap: float  # largest Grover-vs-sandwich probability shortfall
    target_overlap_v0: float  # |<t|v0>|
    target_overlap_vpm: float  # |<t|v+>|^2
    product_error: float = field(default=0.0)  # closed form vs generator product


def sandwich_closed_form(n: int) -> np.ndarray:
    """S_{n,n-1}(1,1,1) = G_{n-1} G_n G_{n-1} in the invariant basis.

    With s = sin(theta2), c = cos(theta2), u = s(3c^2 - s^2), v = c(c^2 - 3s^2):
        [[ v^2,  u v,  u ],
         [-u v, -u^2,  v ],
         [-u,    v,    0 ]]
    (the u^2/v^2 diagonal exponents are dropped in the paper's printed matrix;
    the product form below is the ground truth).
    """
    theta2 = math.asin(math.sqrt(2.0 / 2.0**n))
    s, c = math.sin(theta2), math.cos(theta2)
    u = s * (3 * c * c - s * s)
    v = c * (c * c - 3 * s * s)
    return np.array([[v * v, u * v, u], [-u * v, -u * u, v], [-u, v, 0.0]])


def sandwich_product(n: int) -> np.ndarray:
    loc = local_generator(n, n - 1)
    glob = global_generator(n, n - 1)
    return loc @ glob @ loc


def sandwich_matrix(n: int) -> TheoremDiagnostics:
    """Eigen-analysis of the sandwich sequence: lambda0 = -1, lambda± = e^{±i gamma},
    <t|v0> = 0 and |<t|v±>|^2 = 1/2."""
    if n < 3:
        raise CriticalRatioError("sandwich sequence needs n >= 3")
    mat = sandwich_closed_form(n)
    err = float(np.abs(mat - sandwich_product(n)).max())
    eigvals, eigvecs = np.linalg.eig(mat.astype(complex))
    i0 = int(np.argmin(np.abs(eigvals + 1.0)))
    rest = [i for i in range(3) if i != i0]
    ip = rest[0] if eigvals[rest[0]].imag >= 0 else rest[1]
    im = rest[1] if ip == rest[0] else rest[0]
    lam0, lamp, lamm = eigvals[i0], eigvals[ip], eigvals[im]
    v0, vp = eigvecs[:, i0], eigvecs[:, ip]
    gamma_rot = math.atan2(lamp.imag, lamp.real)

    theta2 = math.asin(math.sqrt(2.0 / 2.0**n))
    j_peak = max(1, math.ceil(math.pi / (2.0 * 3.0 * math.sqrt(2.0) * theta2)))
    s0 = initial_state(n, n - 1).as_array()
    theta = Angles.for_widths(n, n - 1).theta
    delta = 0.0
    vec = s0.copy()
    for j_tilde in range(1, j_peak + 2):
        vec = mat @ vec
        p_grover = math.sin((2 * 3 * j_tilde + 1) * theta) ** 2
        delta = max(delta, p_grover - vec[0] ** 2)
    return TheoremDiagnostics(
        matrix=mat,
        eigenvalues=(complex(lam0), complex(lamp), complex(lamm)),
        rotation_angle=gamma_rot,
        delta_gap=delta,
        target_overlap_v0=float(abs(v0[0])),
        target_overlap_vpm=float(abs(vp[0]) ** 2),
        product_error=err,
    )


def theorem1_probability_check(n: int, j_tilde: int) -> tuple[float, float]:
    """(exact, asymptotic) success probability of S^j~_{n,n-1}(1,1,1):
    exact via matrix powers, asymptotic sin^2(3*sqrt(2)*j~*theta2)."""
    if j_tilde < 0:
        raise CriticalRatioError("j_tilde must be non-negative")
    mat = sandwich_closed_form(n)
    vec = np.linalg.matrix_power(mat, j_tilde) @ initial_state(n, n - 1).as_array()
    theta2 = math.asin(math.sqrt(2.0 / 2.0**n))
    asym = math.sin(3.0 * math.sqrt(2.0) * j_tilde * theta2) ** 2
    return float(vec[0] ** 2), asym


# ---------------------------------------------------------------------------
# Theorem 2: the two-stage witness (G_n G_2)^j~ + S_2(1,0)
# ---------------------------------------------------------------------------


def theorem2_closed_form(n: int) -> np.ndarray:
    """S_{n,2}(1,1) = G_n G_2 in the invariant basis, with sin(gamma) = 2/sqrt(N)."""
    gamma = math.asin(2.0 / math.sqrt(2.0**n))
    c2, s2 = math.cos(2 * gamma), math.sin(2 * gamma)
    r3 = math.sqrt(3.0)
    return 0.5 * np.array(
        [[c2, r3, s2], [r3 * c2, -1.0, r3 * s2], [-2.0 * s2, 0.0, 2.0 * c2]]
    )


def theorem2_product(n: int) -> np.ndarray:
    return global_generator(n, 2) @ local_generator(n, 2)


def theorem2_probability_check(n: int, j_tilde: int) -> tuple[float, float]:
    """(exact, asymptotic) stage-1 block probability of (G_n G_2)^j~:
    exact = 1 - |<u|.|s_n>|^2 via matrix powers, asymptotic sin^2(sqrt(3)*j~*gamma)."""
    if n < 3:
        raise CriticalRatioError("theorem-2 split needs n >= 3")
    mat = theorem2_closed_form(n)
    vec = np.linalg.matrix_power(mat, j_tilde) @ initial_state(n, 2).as_array()
    gamma = math.asin(2.0 / math.sqrt(2.0**n))
    asym = math.sin(math.sqrt(3.0) * j_tilde * gamma) ** 2
    return float(1.0 - vec[2] ** 2), asym
