"""Brute-force full-Hilbert-space simulator (dimension 2^n).

Serves as the independent correctness oracle for the reduced 3-amplitude
model.  Operators are applied as direct O(2^n) arithmetic updates, never as
materialized matrices.  Qubit 0 is the most significant bit of the basis
index; the local block occupies the m lowest-significance qubits, so blocks
are contiguous index ranges.
"""

from __future__ import annotations

import numpy as np

from .sequences import Kind, SequenceSpec

NORM_TOL = 1e-12


class StatevectorError(ValueError):
    pass


def default_target(n: int) -> str:
    return "0" * n


def _target_index(n: int, target: str) -> int:
    if len(target) != n or set(target) - {"0", "1"}:
        raise StatevectorError(f"target {target!r} is not an {n}-bit string")
    return int(target, 2)


def uniform_state(n: int) -> np.ndarray:
    return np.full(2**n, 2.0 ** (-n / 2))


def apply_oracle(state: np.ndarray, target: str) -> np.ndarray:
    """U_t: sign flip on the single marked basis state.  Mutates in place."""
    n = _qubit_count(state)
    state[_target_index(n, target)] *= -1.0
    return state


def apply_global_diffusion(state: np.ndarray) -> np.ndarray:
    """D_n: reflect every amplitude about the global mean.  Mutates in place."""
    mean = state.mean()
    state *= -1.0
    state += 2.0 * mean  # a_i <- 2*mean - a_i
    return state


def apply_local_diffusion(state: np.ndarray, m: int) -> np.ndarray:
    """D_m: reflect amplitudes about their block mean within each 2^m block."""
    n = _qubit_count(state)
    if not 2 <= m < n:
        raise StatevectorError(f"local width m={m} must satisfy 2 <= m < n={n}")
    blocks = state.reshape(-1, 2**m)
    means = blocks.mean(axis=1, keepdims=True)
    blocks *= -1.0
    blocks += 2.0 * means
    return state


def _qubit_count(state: np.ndarray) -> int:
    n = int(state.size - 1).bit_length()
    if state.size != 2**n:
        raise StatevectorError(f"state length {state.size} is not a power of two")
    return n


def run_sequence_full(seq: SequenceSpec, target: str | None = None) -> np.ndarray:
    """Apply oracle+diffusion pairs per block in application order from |s_n>."""
    n = seq.n
    if target is None:
        target = default_target(n)
    _target_index(n, target)
    state = uniform_state(n)
    for kind, count in seq.blocks:
        for _ in range(count):
            apply_oracle(state, target)
            if kind is Kind.GLOBAL:
                apply_global_diffusion(state)
            else:
                apply_local_diffusion(state, seq.m)
    return state


def marginal_probability(state: np.ndarray, qubit_subset, bits: str) -> float:
    """Probability of observing `bits` on `qubit_subset` (qubit 0 = MSB)."""
    n = _qubit_count(state)
    subset = list(qubit_subset)
    if len(subset) != len(bits) or len(set(subset)) != len(subset):
        raise StatevectorError("qubit subset and bits must align and be distinct")
    if any(not 0 <= q < n for q in subset):
        raise StatevectorError(f"qubit subset {subset} outside [0, {n})")
    probs = (state**2).reshape([2] * n)
    idx: list[slice | int] = [slice(None)] * n
    for q, bit in zip(subset, bits):
        if bit not in "01":
            raise StatevectorError(f"bad bit {bit!r}")
        idx[q] = int(bit)
    return float(probs[tuple(idx)].sum())


def success_probability_full(seq: SequenceSpec, target: str | None = None) -> float:
    n = seq.n
    if target is None:
        target = default_target(n)
    state = run_sequence_full(seq, target)
    return float(state[_target_index(n, target)] ** 2)


def block_probability_full(seq: SequenceSpec, target: str | None = None, m: int | None = None) -> float:
    """Probability that the n−m block-address qubits measure to the target's address."""
    n = seq.n
    m_eff = seq.m if m is None else m
    if m_eff is None:
        raise StatevectorError("block probability needs a local width")
    if target is None:
        target = default_target(n)
    state = run_sequence_full(seq, target)
    return marginal_probability(state, range(n - m_eff), target[: n - m_eff])


def amplitude_classes(state: np.ndarray, target: str, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split amplitudes into {target}, {target block minus target}, {outside}."""
    n = _qubit_count(state)
    t = _target_index(n, target)
    b = 2**m
    block_start = (t // b) * b
    block = state[block_start : block_start + b]
    in_block_rest = np.delete(block, t - block_start)
    outside = np.concatenate([state[:block_start], state[block_start + b :]])
    return state[t : t + 1], in_block_rest, outside
