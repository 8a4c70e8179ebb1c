"""Circuit-depth cost model for search schedules.

Depth is counted in layers of basic gates.  The diffusion operator on w
qubits is single-qubit-gate equivalent to the w-qubit generalized Toffoli
gate, so d(D_w) = toffoli_depth(w) + 2.  The oracle depth is expressed
through the ratio alpha = d(U_t)/d(D_n); the oracle always acts on all n
qubits, so its depth is constant across stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

# Depth of the w-qubit generalized Toffoli gate under the linear
# decomposition, w = 2..10.  Beyond w=10 the arithmetic +40 tail continues.
_BASE_TOFFOLI_DEPTHS = (1, 5, 13, 29, 61, 120, 160, 200, 240)
_BASE_MAX_WIDTH = 10
_TAIL_STEP = 40

Number = int | float | Fraction


class CostModelError(ValueError):
    """Invalid cost-model input: width out of range, malformed table, bad alpha."""


class InfeasibleError(CostModelError):
    """A schedule with zero success probability has no finite expected depth."""


@dataclass(frozen=True)
class GateDepthTable:
    """Per-width depth of the generalized Toffoli gate Λ_{w−1}(X).

    Entries must cover every width in [2, max_width] and be monotonically
    non-decreasing.
    """

    entries: tuple[int, ...]  # entries[w - 2] is the depth at width w

    def __post_init__(self) -> None:
        if len(self.entries) < 1:
            raise CostModelError("gate depth table is empty")
        prev = -1
        for w, d in enumerate(self.entries, start=2):
            if not isinstance(d, int) or d < 0:
                raise CostModelError(f"depth at width {w} must be a non-negative integer, got {d!r}")
            if d < prev:
                raise CostModelError(f"table not monotonically non-decreasing at width {w}")
            prev = d

    @property
    def max_width(self) -> int:
        return len(self.entries) + 1

    @classmethod
    def default(cls, max_width: int = _BASE_MAX_WIDTH) -> "GateDepthTable":
        """Built-in linear-decomposition depths, extended by +40 per qubit past w=10."""
        if max_width < 2:
            raise CostModelError("max_width must be at least 2")
        entries = list(_BASE_TOFFOLI_DEPTHS[: max_width - 1])
        for w in range(_BASE_MAX_WIDTH + 1, max_width + 1):
            entries.append(_BASE_TOFFOLI_DEPTHS[-1] + _TAIL_STEP * (w - _BASE_MAX_WIDTH))
        return cls(tuple(entries))

    @classmethod
    def from_file(cls, path: str | Path) -> "GateDepthTable":
        """Load a table from a text file with one `w,depth` record per line."""
        seen: dict[int, int] = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise CostModelError(f"{path}:{lineno}: expected `w,depth`, got {raw!r}")
            try:
                w, d = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise CostModelError(f"{path}:{lineno}: non-integer field in {raw!r}") from exc
            if w in seen:
                raise CostModelError(f"{path}:{lineno}: duplicate width {w}")
            seen[w] = d
        if not seen:
            raise CostModelError(f"{path}: empty table")
        widths = sorted(seen)
        if widths[0] != 2 or widths != list(range(2, widths[-1] + 1)):
            raise CostModelError(f"{path}: widths must cover 2..w_max contiguously, got {widths}")
        return cls(tuple(seen[w] for w in widths))

    def toffoli_depth(self, w: int) -> int:
        if not 2 <= w <= self.max_width:
            raise CostModelError(f"width {w} outside table range [2, {self.max_width}]")
        return self.entries[w - 2]

    def diffusion_depth(self, w: int) -> int:
        """d(D_w) = d(Λ_{w−1}(X)) + 2."""
        return self.toffoli_depth(w) + 2


def diffusion_depth(table: GateDepthTable, w: int) -> int:
    return table.diffusion_depth(w)


@dataclass(frozen=True)
class DepthParams:
    """Cost-model parameters: the oracle/diffusion ratio, the gate table, and n."""

    alpha: Number
    table: GateDepthTable
    n: int

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise CostModelError(f"alpha must be positive, got {self.alpha}")
        if not 2 <= self.n <= self.table.max_width:
            raise CostModelError(f"n={self.n} outside table range [2, {self.table.max_width}]")

    @classmethod
    def make(cls, n: int, alpha: Number = 1, table: GateDepthTable | None = None) -> "DepthParams":
        if table is None:
            table = GateDepthTable.default(max(n, _BASE_MAX_WIDTH))
        return cls(alpha=alpha, table=table, n=n)


def oracle_depth(params: DepthParams) -> Number:
    """d(U_t) = alpha * d(D_n).  Exact when alpha is an int or Fraction."""
    return params.alpha * params.table.diffusion_depth(params.n)


@dataclass(frozen=True)
class DepthBreakdown:
    oracle_calls: int
    global_diffusions: int
    local_diffusions: int
    local_width: int  # 0 when the sequence has no local operators
    total_depth: Number


def sequence_depth(seq, params: DepthParams) -> DepthBreakdown:
    """Depth of one run: every operator queries the oracle once, then applies
    its diffusion; totals are additive over the schedule."""
    if seq.n != params.n:
        raise CostModelError(f"sequence width {seq.n} != params width {params.n}")
    oracles, n_glob, n_loc = seq.operator_counts()
    d_n = params.table.diffusion_depth(params.n)
    if n_loc:
        if seq.m >= seq.n:
            raise CostModelError(f"local width {seq.m} must be below {seq.n}")
        d_m = params.table.diffusion_depth(seq.m)
        local_width = seq.m
    else:
        d_m, local_width = 0, 0
    total = oracles * oracle_depth(params) + n_glob * d_n + n_loc * d_m
    return DepthBreakdown(oracles, n_glob, n_loc, local_width, total)


def expected_depth(depth: Number, success_probability: float) -> float:
    """depth / p, the expected depth of repeat-until-success execution."""
    if depth < 0:
        raise CostModelError(f"depth must be non-negative, got {depth}")
    if not 0 < success_probability <= 1 + 1e-12:
        raise InfeasibleError(f"success probability {success_probability} not in (0, 1]")
    return float(depth) / float(success_probability)
