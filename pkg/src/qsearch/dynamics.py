"""Exact amplitude evolution in the 3-dimensional invariant subspace.

For a single marked item and local diffusion acting on a fixed m-qubit block,
the dynamics of any global/local operator schedule stay in the span of the
target |t>, the normalized rest of the target block |ntt>, and the normalized
rest of the database |u>.  All matrix elements are real, so everything lives
in O(3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .sequences import Kind, SequenceSpec

NORM_TOL = 1e-12


class DynamicsError(ValueError):
    """Width out of range or inconsistent sequence/state widths."""


@dataclass(frozen=True)
class Angles:
    """theta: full-database Grover angle; theta2: in-block angle; gamma: block-address angle."""

    theta: float
    theta2: float
    gamma: float

    @classmethod
    def for_widths(cls, n: int, m: int) -> "Angles":
        return cls(
            theta=math.asin(2.0 ** (-n / 2)),
            theta2=math.asin(2.0 ** (-m / 2)),
            gamma=math.asin(2.0 ** (-(n - m) / 2)),
        )


class ReducedState(NamedTuple):
    a_t: float
    a_ntt: float
    a_u: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)

    def norm(self) -> float:
        return math.sqrt(self.a_t**2 + self.a_ntt**2 + self.a_u**2)


def _check_widths(n: int, m: int) -> None:
    # m == n is the degenerate single-block basis (K=1, gamma=pi/2); it is used
    # internally for pure-Grover schedules but local operators require m < n.
    if not 1 <= m <= n:
        raise DynamicsError(f"block width m={m} out of range for n={n}")


def initial_state(n: int, m: int) -> ReducedState:
    """|s_n> in the {|t>,|ntt>,|u>} basis: (sin γ sin θ₂, sin γ cos θ₂, cos γ)."""
    _check_widths(n, m)
    ang = Angles.for_widths(n, m)
    sg, cg = math.sin(ang.gamma), math.cos(ang.gamma)
    return ReducedState(sg * math.sin(ang.theta2), sg * math.cos(ang.theta2), cg)


def global_generator(n: int, m: int) -> np.ndarray:
    """Reduced G_n = (2|s><s| - I) · diag(-1, 1, 1) on the (n, m) basis."""
    _check_widths(n, m)
    s = initial_state(n, m).as_array()
    return (2.0 * np.outer(s, s) - np.eye(3)) @ np.diag([-1.0, 1.0, 1.0])


def local_generator(n: int, m: int) -> np.ndarray:
    """Reduced G_m: an in-block rotation by 2θ₂ leaving |u> untouched."""
    if not 2 <= m < n:
        raise DynamicsError(f"local width m={m} must satisfy 2 <= m < n={n}")
    return local_power(n, m, 1)


def local_power(n: int, m: int, j: int) -> np.ndarray:
    """G_m^j built from the exact angle 2jθ₂ (no incremental drift)."""
    _check_widths(n, m)
    ang = 2.0 * j * Angles.for_widths(n, m).theta2
    c, s = math.cos(ang), math.sin(ang)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def _basis_width(seq: SequenceSpec, m: int | None) -> int:
    if m is not None:
        return m
    if seq.m is not None:
        return seq.m
    return seq.n  # pure Grover: any block split works; use the single-block basis


def apply_sequence(seq: SequenceSpec, state: ReducedState | None = None, m: int | None = None) -> ReducedState:
    """Apply the schedule's blocks in application order (first block acts first)."""
    m_eff = _basis_width(seq, m)
    if m is not None and seq.m is not None and m != seq.m:
        raise DynamicsError(f"sequence local width {seq.m} inconsistent with basis width {m}")
    vec = (initial_state(seq.n, m_eff) if state is None else state).as_array()
    g_mat: np.ndarray | None = None
    for kind, count in seq.blocks:
        if kind is Kind.LOCAL:
            vec = local_power(seq.n, m_eff, count) @ vec
        else:
            if g_mat is None:
                g_mat = global_generator(seq.n, m_eff)
            for _ in range(count):
                vec = g_mat @ vec
    out = ReducedState(*vec)
    if abs(out.norm() - 1.0) > 1e-9:
        raise DynamicsError(f"norm drifted to {out.norm()}")
    return out


def success_probability(seq: SequenceSpec, n: int | None = None, m: int | None = None) -> float:
    """|<t| S |s_n>|²."""
    if n is not None and n != seq.n:
        raise DynamicsError(f"sequence width {seq.n} != n={n}")
    if seq.is_pure_grover():
        return grover_probability_closed_form(seq.n, seq.j_tot)
    return apply_sequence(seq, m=m).a_t ** 2


def block_success_probability(seq: SequenceSpec, n: int | None = None, m: int | None = None) -> float:
    """Probability that measuring the n−m block-address qubits reveals t_1."""
    if n is not None and n != seq.n:
        raise DynamicsError(f"sequence width {seq.n} != n={n}")
    final = apply_sequence(seq, m=m)
    return final.a_t**2 + final.a_ntt**2


def grover_probability_closed_form(n: int, j: int) -> float:
    """P_n(j) = sin²((2j+1)θ) with sin θ = 2^{-n/2}."""
    if j < 0:
        raise DynamicsError(f"iteration count must be non-negative, got {j}")
    theta = math.asin(2.0 ** (-n / 2))
    return math.sin((2 * j + 1) * theta) ** 2


def j_max(n: int) -> int:
    """⌊π√N/4⌋, where plain Grover's success probability approaches 1."""
    return int(math.pi * 2.0 ** (n / 2) / 4.0)


def j_expected(n: int) -> int:
    """⌊0.583√N⌋, the expected-cost-optimal plain Grover iteration count."""
    return int(0.583 * 2.0 ** (n / 2))
