"""Operator-sequence notation S_{n,m}(j_1,...,j_q) and two-stage plans.

The canonical in-memory form is a normalized list of (kind, count) blocks in
application order: the first block acts first on the state.  The tuple
notation exists only at the I/O boundary and is interpreted right-to-left;
the last tuple entry always counts local operators and acts first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class SequenceError(ValueError):
    """Malformed notation or inconsistent widths."""


class Kind(Enum):
    GLOBAL = "G"
    LOCAL = "L"


Block = tuple[Kind, int]


def _normalize(blocks) -> tuple[Block, ...]:
    out: list[Block] = []
    for kind, count in blocks:
        if count < 0:
            raise SequenceError(f"negative block count {count}")
        if count == 0:
            continue
        if out and out[-1][0] is kind:
            out[-1] = (kind, out[-1][1] + count)
        else:
            out.append((kind, count))
    return tuple(out)


@dataclass(frozen=True)
class SequenceSpec:
    """An alternating schedule of global and local Grover operators.

    m is the local block width; it is None exactly when the schedule has no
    local operators (pure Grover).
    """

    n: int
    m: int | None
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", _normalize(self.blocks))
        if self.n < 2:
            raise SequenceError(f"n must be at least 2, got {self.n}")
        has_local = any(kind is Kind.LOCAL for kind, _ in self.blocks)
        if has_local:
            if self.m is None:
                raise SequenceError("local operators present but no local width m")
            if not 2 <= self.m < self.n:
                raise SequenceError(f"local width m={self.m} must satisfy 2 <= m < n={self.n}")
        elif self.m is not None:
            object.__setattr__(self, "m", None)  # canonical: pure Grover carries no m

    @classmethod
    def pure_grover(cls, n: int, j: int) -> "SequenceSpec":
        return cls(n, None, ((Kind.GLOBAL, j),))

    @classmethod
    def from_ops(cls, n: int, m: int | None, ops: str) -> "SequenceSpec":
        """Build from an application-order op string like "LLGL"."""
        blocks = [(Kind.GLOBAL if ch == "G" else Kind.LOCAL, 1) for ch in ops]
        return cls(n, m, tuple(blocks))

    def op_string(self) -> str:
        return "".join(kind.value * count for kind, count in self.blocks)

    @property
    def j_tot(self) -> int:
        return sum(count for _, count in self.blocks)

    def operator_counts(self) -> tuple[int, int, int]:
        """(oracle_calls, global_count, local_count); every operator queries the oracle once."""
        n_glob = sum(c for k, c in self.blocks if k is Kind.GLOBAL)
        n_loc = sum(c for k, c in self.blocks if k is Kind.LOCAL)
        return n_glob + n_loc, n_glob, n_loc

    def is_pure_grover(self) -> bool:
        return all(kind is Kind.GLOBAL for kind, _ in self.blocks)

    def __str__(self) -> str:
        return format_paper_notation(self)


_NOTATION_RE = re.compile(
    r"^\s*S_\{?(?P<n>\d+)(?:\s*,\s*(?P<m>\d+))?\}?\s*\(\s*(?P<js>\d+(?:\s*,\s*\d+)*)\s*\)\s*$"
)


def parse_paper_notation(text: str) -> SequenceSpec:
    """Parse S_{n,m}(j_1,...,j_q) into application-order blocks.

    The tuple is read right-to-left: j_q local operators act first, then
    j_{q-1} global ones, alternating leftward.  S_n(j,0) is pure Grover.
    """
    match = _NOTATION_RE.match(text)
    if match is None:
        raise SequenceError(f"cannot parse sequence notation {text!r}")
    n = int(match.group("n"))
    m = int(match.group("m")) if match.group("m") else None
    js = [int(tok) for tok in match.group("js").split(",")]
    blocks: list[Block] = []
    kind = Kind.LOCAL
    for j in reversed(js):
        blocks.append((kind, j))
        kind = Kind.GLOBAL if kind is Kind.LOCAL else Kind.LOCAL
    if m is None and any(k is Kind.LOCAL and c > 0 for k, c in blocks):
        raise SequenceError(f"{text!r} has local operators but no local width m")
    return SequenceSpec(n, m, tuple(blocks))


def format_paper_notation(seq: SequenceSpec) -> str:
    """Inverse of parse_paper_notation on normalized sequences."""
    if not seq.blocks:
        return f"S_{seq.n}(0,0)"
    if seq.is_pure_grover():
        return f"S_{seq.n}({seq.j_tot},0)"
    # Fill slots first-applied-first; slot kinds alternate L, G, L, ... so that
    # the slot written last in the tuple (applied first) counts locals.
    slots: list[int] = []
    kind = Kind.LOCAL
    for block_kind, count in seq.blocks:
        while block_kind is not kind:
            slots.append(0)
            kind = Kind.GLOBAL if kind is Kind.LOCAL else Kind.LOCAL
        slots.append(count)
        kind = Kind.GLOBAL if kind is Kind.LOCAL else Kind.LOCAL
    js = ",".join(str(j) for j in reversed(slots))
    return f"S_{{{seq.n},{seq.m}}}({js})"


@dataclass(frozen=True)
class TwoStagePlan:
    """Two-stage schedule: stage 1 reveals the m1 block-address bits, stage 2
    searches the remaining m2 bits on the rescaled database."""

    m1: int
    m2: int
    m_prime: int | None
    stage1: SequenceSpec
    stage2: SequenceSpec

    def __post_init__(self) -> None:
        n = self.m1 + self.m2
        if self.m1 < 0 or self.m2 < 2:
            raise SequenceError(f"invalid bit split ({self.m1}, {self.m2})")
        if self.stage1.n != n:
            raise SequenceError(f"stage-1 width {self.stage1.n} != n={n}")
        if self.stage1.m is not None and self.stage1.m != self.m2:
            raise SequenceError(f"stage-1 local width {self.stage1.m} != m2={self.m2}")
        if self.stage2.n != self.m2:
            raise SequenceError(f"stage-2 width {self.stage2.n} != m2={self.m2}")
        if self.stage2.m is not None and self.m_prime != self.stage2.m:
            raise SequenceError(f"stage-2 local width {self.stage2.m} != m'={self.m_prime}")
        if self.m_prime is not None and not 2 <= self.m_prime < self.m2:
            raise SequenceError(f"m'={self.m_prime} must satisfy 2 <= m' < m2={self.m2}")

    @property
    def n(self) -> int:
        return self.m1 + self.m2

    def __str__(self) -> str:
        return f"{self.stage1} | {self.stage2}"
