"""Knapsack-family encodings, compressions, and ground-truth DP oracles.

The family (0-1 knapsack, subset sum, unbounded knapsack, multi-dimensional
knapsack) compresses through one primitive: a *threshold row reduction*. A
constraint row with nonnegative data, read as the joint vector
(coefficients...; rhs), is replaced by the l1-minimal nonnegative vector that
gives every 0-1 point the same three-way verdict "row sum <, =, > rhs". That
preserves the exact set of feasible item subsets, so rebuilding the instance
around the reduced rows (with fresh integer slack variables re-bounded to the
reduced data) is a static equivalence at the instance level: identical 0-1
solutions, slack values existentially matched.

Reducing the row natively at its own dimension -- instead of binary-expanding
slack variables into extra 0-1 columns -- is what makes compression possible
at all: a power-of-two slack chain is its own minimal equivalent (each bit
must dominate the sum of the lower ones), and once the chain is pinned the
comparisons against it force every original coefficient to reproduce itself
exactly. The native route only has to preserve subset-vs-threshold verdicts,
whose minimal representatives are small.

Separation over the difference set {(x; -1), (-x; 1) : x in {0,1}^n} is a
dynamic program: bucket subsets by their candidate-side sum (small by
construction), track per bucket the extremal original-side sums with
witnesses, and test the extremal witnesses exactly. Testing both extremes of
every bucket finds a mismatch whenever one exists, so separation is complete
for integer candidates; fractional LP iterates are separated best-effort
through their floor and every returned cut is re-checked against the true
fractional point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .budget import (
    BOX_ENUM_BUDGET,
    DP_CELL_BUDGET,
    BudgetError,
    InputError,
    VerificationError,
    resolve_budget,
)
from .equivvec import _minimize_over_cone, reduced_norm_bound
from .exactmath import IntMatrix, IntVector, bit_size, dot, floor_frac, l1_norm
from .ilpcore import FeasIlp
from .ilpreduce import StaticEquivIlp

__all__ = [
    "KnapsackInstance",
    "SubsetSumInstance",
    "UnboundedKnapsackInstance",
    "MdKnapsackInstance",
    "KnapsackCompression",
    "SubsetSumCompression",
    "MdKnapsackCompression",
    "UksEquiv",
    "knapsack_to_ilp",
    "subsetsum_to_ilp",
    "mdknapsack_to_ilp",
    "static_equiv_knapsack",
    "static_equiv_subsetsum",
    "static_equiv_mdknapsack",
    "compress_knapsack",
    "compress_subsetsum",
    "compress_mdknapsack",
    "uks_to_knapsack",
    "equiv_uks",
    "dp_knapsack_oracle",
    "dp_uks_oracle",
    "feasible_subsets",
    "feasible_subsets_md",
    "subsetsum_solutions",
]


@dataclass(frozen=True)
class KnapsackInstance:
    """Items with positive weights and nonnegative profits; pack weight <= capacity,
    profit >= target."""

    weights: IntVector
    profits: IntVector
    capacity: int
    target: int

    def __post_init__(self) -> None:
        n = len(self.weights)
        if n < 1:
            raise InputError("need at least one item")
        if len(self.profits) != n:
            raise InputError("profits length must match weights")
        if any(w <= 0 for w in self.weights):
            raise InputError("weights must be positive")
        if any(p < 0 for p in self.profits):
            raise InputError("profits must be nonnegative")
        if self.capacity < 0:
            raise InputError("capacity must be nonnegative")

    @property
    def n_items(self) -> int:
        return len(self.weights)

    @property
    def trivially_infeasible(self) -> bool:
        return self.target > sum(self.profits)

    def bit_scalars(self):
        yield self.weights
        yield self.profits
        yield self.capacity
        yield self.target


@dataclass(frozen=True)
class SubsetSumInstance:
    """Positive values; hit the target exactly."""

    values: IntVector
    target: int

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise InputError("need at least one value")
        if any(v <= 0 for v in self.values):
            raise InputError("values must be positive")

    def bit_scalars(self):
        yield self.values
        yield self.target


@dataclass(frozen=True)
class UnboundedKnapsackInstance:
    """Knapsack where every item may repeat arbitrarily often."""

    weights: IntVector
    profits: IntVector
    capacity: int
    target: int

    def __post_init__(self) -> None:
        n = len(self.weights)
        if n < 1:
            raise InputError("need at least one item")
        if len(self.profits) != n:
            raise InputError("profits length must match weights")
        if any(w <= 0 for w in self.weights):
            raise InputError("weights must be positive")
        if any(p < 0 for p in self.profits):
            raise InputError("profits must be nonnegative")
        if self.capacity < 0:
            raise InputError("capacity must be nonnegative")

    def bit_scalars(self):
        yield self.weights
        yield self.profits
        yield self.capacity
        yield self.target


@dataclass(frozen=True)
class MdKnapsackInstance:
    """Items weighed in several dimensions at once, one capacity per dimension."""

    weight_matrix: IntMatrix
    profits: IntVector
    capacities: IntVector
    target: int

    def __post_init__(self) -> None:
        if self.weight_matrix.ncols < 1:
            raise InputError("need at least one item")
        if len(self.profits) != self.weight_matrix.ncols:
            raise InputError("profits length must match item count")
        if len(self.capacities) != self.weight_matrix.nrows:
            raise InputError("one capacity per weight dimension")
        if any(v < 0 for v in self.weight_matrix.entries):
            raise InputError("weights must be nonnegative")
        if any(p < 0 for p in self.profits):
            raise InputError("profits must be nonnegative")
        if any(c < 0 for c in self.capacities):
            raise InputError("capacities must be nonnegative")

    def bit_scalars(self):
        yield self.weight_matrix
        yield self.profits
        yield self.capacities
        yield self.target


# ---------------------------------------------------------------------------
# ILP encodings (equality rows with integer slack variables)
# ---------------------------------------------------------------------------


def knapsack_to_ilp(inst: KnapsackInstance) -> FeasIlp:
    """Two equality rows over x in {0,1}^n plus two slack columns.

    weights . x + s1 = capacity (s1 in [0, capacity]) and
    profits . x - s2 = target (s2 in [0, max(0, sum(profits) - target)]).
    A target above the total profit clamps the s2 range to [0, 0] and the
    system is honestly infeasible (see ``trivially_infeasible``).
    """
    n = inst.n_items
    rows = [
        tuple(inst.weights) + (1, 0),
        tuple(inst.profits) + (0, -1),
    ]
    surplus = max(0, sum(inst.profits) - inst.target)
    return FeasIlp(
        a=IntMatrix.from_rows(rows),
        b=(inst.capacity, inst.target),
        upper=(1,) * n + (inst.capacity, surplus),
    )


def subsetsum_to_ilp(inst: SubsetSumInstance) -> FeasIlp:
    """Single exact-capacity row; hitting the target exactly needs no slack."""
    return FeasIlp(
        a=IntMatrix.from_rows([tuple(inst.values)]),
        b=(inst.target,),
        upper=(1,) * len(inst.values),
    )


def mdknapsack_to_ilp(inst: MdKnapsackInstance) -> FeasIlp:
    """M capacity rows (slack each) plus the profit row (surplus slack)."""
    n, m = inst.weight_matrix.ncols, inst.weight_matrix.nrows
    rows = []
    for i in range(m):
        slack = tuple(1 if j == i else 0 for j in range(m + 1))
        rows.append(inst.weight_matrix.row(i) + slack)
    rows.append(tuple(inst.profits) + (0,) * m + (-1,))
    surplus = max(0, sum(inst.profits) - inst.target)
    return FeasIlp(
        a=IntMatrix.from_rows(rows),
        b=tuple(inst.capacities) + (inst.target,),
        upper=(1,) * n + tuple(inst.capacities) + (surplus,),
    )


# ---------------------------------------------------------------------------
# threshold row reduction
# ---------------------------------------------------------------------------


class ThresholdSeparator:
    """Exact separation for subset-vs-threshold verdicts of one data row.

    The base row is (coefficients...; rhs), all nonnegative. ``find_batch``
    returns difference vectors z = (x; -1), x in {0,1}^n, on which the
    candidate's verdict sign differs from the base row's. Complete for
    integer candidates (see module docstring for the bucket argument);
    best-effort for fractional ones, every cut re-validated exactly.
    """

    def __init__(self, row: IntVector, budget: Optional[int] = None):
        if any(c < 0 for c in row):
            raise InputError("threshold rows take nonnegative data")
        self.row = tuple(row)
        self.cells = resolve_budget(budget, DP_CELL_BUDGET)

    def find(self, cand) -> Optional[IntVector]:
        hits = self.find_batch(cand, 1)
        return hits[0] if hits else None

    def find_batch(self, cand, limit: int) -> list[IntVector]:
        n = len(self.row) - 1
        base, rhs = self.row[:-1], self.row[-1]
        keys = [
            floor_frac(c) if isinstance(c, Fraction) else int(c) for c in cand[:n]
        ]
        total = sum(keys)
        if (n + 1) * (total + 1) > self.cells:
            raise BudgetError("threshold separation exceeded its DP cell budget")
        mins: list[list[Optional[int]]] = [[None] * (total + 1) for _ in range(n + 1)]
        maxs: list[list[Optional[int]]] = [[None] * (total + 1) for _ in range(n + 1)]
        mins[0][0] = maxs[0][0] = 0
        for i in range(1, n + 1):
            key, coeff = keys[i - 1], base[i - 1]
            prev_min, prev_max = mins[i - 1], maxs[i - 1]
            cur_min, cur_max = mins[i], maxs[i]
            for s in range(total + 1):
                lo, hi = prev_min[s], prev_max[s]
                if s >= key and prev_min[s - key] is not None:
                    lo2 = prev_min[s - key] + coeff
                    hi2 = prev_max[s - key] + coeff
                    lo = lo2 if lo is None or lo2 < lo else lo
                    hi = hi2 if hi is None or hi2 > hi else hi
                cur_min[s], cur_max[s] = lo, hi

        def backtrack(bucket: int, minimal: bool) -> tuple[int, ...]:
            table = mins if minimal else maxs
            x = [0] * n
            s = bucket
            for i in range(n, 0, -1):
                stay = table[i - 1][s]
                if stay is not None and stay == table[i][s]:
                    continue
                x[i - 1] = 1
                s -= keys[i - 1]
            return tuple(x)

        def sign(value) -> int:
            return (value > 0) - (value < 0)

        hits: list[IntVector] = []
        for s in range(total + 1):
            if mins[n][s] is None:
                continue
            for minimal in (True, False):
                x = backtrack(s, minimal)
                z = x + (-1,)
                if z in hits:
                    continue
                if sign(dot(base, x) - rhs) != sign(dot(cand[:n], x) - cand[n]):
                    hits.append(z)
        if len(hits) > limit:
            # spread the returned cuts across the whole bucket range; a prefix
            # would cluster around small sums and slow convergence
            step = len(hits) / limit
            hits = [hits[int(i * step)] for i in range(limit)]
        return hits


def _reduce_threshold_row(row: IntVector, budget: Optional[int] = None) -> IntVector:
    """l1-minimal nonnegative row with the same subset-vs-rhs verdicts.

    The minimum over the full difference box obeys the norm bound and lies in
    this (weaker) cone too, so the bound doubles as a feasibility and sanity
    cap here.
    """
    row = tuple(int(v) for v in row)
    if not any(row):
        return row
    separator = ThresholdSeparator(row, budget)
    bound = reduced_norm_bound(len(row), 1)
    reduced = _minimize_over_cone(row, bound, separator, 1, prescan=False)
    if l1_norm(reduced) > min(bound, l1_norm(row)):
        raise VerificationError("row reduction exceeded its proven norm bound")
    return reduced


def _system_bits(ilp: FeasIlp) -> int:
    return bit_size(ilp.a) + bit_size(ilp.b)


def _equiv_record(original: FeasIlp, reduced: FeasIlp, n_vars: int) -> StaticEquivIlp:
    m = original.a.nrows
    bound = 4 * m * (n_vars + 1) ** 2 * (1 + (n_vars + 1).bit_length())
    return StaticEquivIlp(
        original=original,
        reduced=reduced,
        u_used=1,
        bit_report=(_system_bits(original), _system_bits(reduced), bound),
    )


@dataclass(frozen=True)
class KnapsackCompression:
    original: KnapsackInstance
    reduced: KnapsackInstance
    equiv: StaticEquivIlp


@dataclass(frozen=True)
class SubsetSumCompression:
    original: SubsetSumInstance
    reduced: SubsetSumInstance
    equiv: StaticEquivIlp


@dataclass(frozen=True)
class MdKnapsackCompression:
    original: MdKnapsackInstance
    reduced: MdKnapsackInstance
    equiv: StaticEquivIlp


def compress_knapsack(
    inst: KnapsackInstance, budget: Optional[int] = None
) -> KnapsackCompression:
    """Reduce the weight and profit rows; rebuild the instance around them.

    Feasible item subsets are preserved exactly; the slack variables of the
    ILP encodings correspond existentially (their values are determined by
    the respective data rows).
    """
    wrow = _reduce_threshold_row(tuple(inst.weights) + (inst.capacity,), budget)
    prow = _reduce_threshold_row(tuple(inst.profits) + (inst.target,), budget)
    reduced = KnapsackInstance(
        weights=wrow[:-1], profits=prow[:-1], capacity=wrow[-1], target=prow[-1]
    )
    equiv = _equiv_record(knapsack_to_ilp(inst), knapsack_to_ilp(reduced), inst.n_items + 2)
    return KnapsackCompression(original=inst, reduced=reduced, equiv=equiv)


def static_equiv_knapsack(
    inst: KnapsackInstance, budget: Optional[int] = None
) -> StaticEquivIlp:
    return compress_knapsack(inst, budget).equiv


def compress_subsetsum(
    inst: SubsetSumInstance, budget: Optional[int] = None
) -> SubsetSumCompression:
    """Exact-capacity variant: one row, no slack, target reduced with the values."""
    row = _reduce_threshold_row(tuple(inst.values) + (inst.target,), budget)
    reduced = SubsetSumInstance(values=row[:-1], target=row[-1])
    equiv = _equiv_record(
        subsetsum_to_ilp(inst), subsetsum_to_ilp(reduced), len(inst.values)
    )
    return SubsetSumCompression(original=inst, reduced=reduced, equiv=equiv)


def static_equiv_subsetsum(
    inst: SubsetSumInstance, budget: Optional[int] = None
) -> StaticEquivIlp:
    return compress_subsetsum(inst, budget).equiv


def compress_mdknapsack(
    inst: MdKnapsackInstance, budget: Optional[int] = None
) -> MdKnapsackCompression:
    """Reduce each capacity row and the profit row independently."""
    m = inst.weight_matrix.nrows
    rows = [
        _reduce_threshold_row(inst.weight_matrix.row(i) + (inst.capacities[i],), budget)
        for i in range(m)
    ]
    prow = _reduce_threshold_row(tuple(inst.profits) + (inst.target,), budget)
    reduced = MdKnapsackInstance(
        weight_matrix=IntMatrix.from_rows([r[:-1] for r in rows]),
        profits=prow[:-1],
        capacities=tuple(r[-1] for r in rows),
        target=prow[-1],
    )
    equiv = _equiv_record(
        mdknapsack_to_ilp(inst),
        mdknapsack_to_ilp(reduced),
        inst.weight_matrix.ncols + m + 1,
    )
    return MdKnapsackCompression(original=inst, reduced=reduced, equiv=equiv)


def static_equiv_mdknapsack(
    inst: MdKnapsackInstance, budget: Optional[int] = None
) -> StaticEquivIlp:
    return compress_mdknapsack(inst, budget).equiv


# ---------------------------------------------------------------------------
# unbounded knapsack via binary copy expansion
# ---------------------------------------------------------------------------


def uks_to_knapsack(
    inst: UnboundedKnapsackInstance,
) -> tuple[KnapsackInstance, tuple[Optional[tuple[int, int]], ...]]:
    """Binary copy expansion: item i becomes copies (2^j w_i, 2^j p_i).

    j runs over {0, ..., floor(log2(capacity / w_i))}, so multiplicities
    0..floor(capacity / w_i) are all representable (the range includes j = 0;
    a range starting at 1 could not even take a single copy). Items heavier
    than the capacity are dropped. If nothing fits, one unpackable
    placeholder item (capacity+1, profit 0) keeps the instance well-formed;
    its copy entry is None and it never affects values.

    Returns the 0-1 instance and the copy map: entry k is (i, j) for expanded
    column k.
    """
    weights: list[int] = []
    profits: list[int] = []
    copies: list[Optional[tuple[int, int]]] = []
    for i, (w, p) in enumerate(zip(inst.weights, inst.profits)):
        if w > inst.capacity:
            continue
        k_max = (inst.capacity // w).bit_length() - 1
        for j in range(k_max + 1):
            weights.append(w << j)
            profits.append(p << j)
            copies.append((i, j))
    if not weights:
        weights, profits, copies = [inst.capacity + 1], [0], [None]
    return (
        KnapsackInstance(
            weights=tuple(weights),
            profits=tuple(profits),
            capacity=inst.capacity,
            target=inst.target,
        ),
        tuple(copies),
    )


@dataclass(frozen=True)
class UksEquiv:
    """Expansion plus static reduction, with the copy map as pre-solution.

    ``to_multiplicities`` is the solution translator: a 0-1 choice over the
    expanded columns maps back to original item multiplicities.
    """

    original: UnboundedKnapsackInstance
    expanded: KnapsackInstance
    copies: tuple[Optional[tuple[int, int]], ...]
    compression: KnapsackCompression

    def to_multiplicities(self, choice: IntVector) -> IntVector:
        if len(choice) != len(self.copies):
            raise InputError("choice length must match expanded column count")
        mult = [0] * len(self.original.weights)
        for picked, entry in zip(choice, self.copies):
            if picked and entry is not None:
                item, j = entry
                mult[item] += 1 << j
        return tuple(mult)


def equiv_uks(
    inst: UnboundedKnapsackInstance, budget: Optional[int] = None
) -> UksEquiv:
    expanded, copies = uks_to_knapsack(inst)
    compression = compress_knapsack(expanded, budget)
    return UksEquiv(
        original=inst, expanded=expanded, copies=copies, compression=compression
    )


# ---------------------------------------------------------------------------
# ground-truth oracles
# ---------------------------------------------------------------------------


def dp_knapsack_oracle(
    inst: KnapsackInstance, budget: Optional[int] = None
) -> tuple[int, bool]:
    """(max achievable profit, profit target reachable) by weight-indexed DP."""
    cells = resolve_budget(budget, DP_CELL_BUDGET)
    if inst.n_items * (inst.capacity + 1) > cells:
        raise BudgetError("knapsack DP exceeds its cell budget")
    best = [0] * (inst.capacity + 1)
    for w, p in zip(inst.weights, inst.profits):
        for j in range(inst.capacity, w - 1, -1):
            cand = best[j - w] + p
            if cand > best[j]:
                best[j] = cand
    top = best[inst.capacity]
    return top, top >= inst.target


def dp_uks_oracle(inst: UnboundedKnapsackInstance, budget: Optional[int] = None) -> int:
    """Max achievable profit with unlimited repetition, by forward DP."""
    cells = resolve_budget(budget, DP_CELL_BUDGET)
    if len(inst.weights) * (inst.capacity + 1) > cells:
        raise BudgetError("unbounded knapsack DP exceeds its cell budget")
    best = [0] * (inst.capacity + 1)
    for w, p in zip(inst.weights, inst.profits):
        for j in range(w, inst.capacity + 1):
            cand = best[j - w] + p
            if cand > best[j]:
                best[j] = cand
    return best[inst.capacity]


def _all_subsets(n: int):
    if (1 << n) * max(n, 1) > BOX_ENUM_BUDGET:
        raise BudgetError("subset scan too large")
    for mask in range(1 << n):
        yield tuple((mask >> i) & 1 for i in range(n))


def feasible_subsets(inst: KnapsackInstance) -> tuple[IntVector, ...]:
    """All 0-1 item vectors within capacity that reach the target (scan oracle)."""
    out = []
    for x in _all_subsets(inst.n_items):
        if (
            dot(inst.weights, x) <= inst.capacity
            and dot(inst.profits, x) >= inst.target
        ):
            out.append(x)
    return tuple(out)


def feasible_subsets_md(inst: MdKnapsackInstance) -> tuple[IntVector, ...]:
    out = []
    for x in _all_subsets(inst.weight_matrix.ncols):
        if all(
            dot(inst.weight_matrix.row(i), x) <= inst.capacities[i]
            for i in range(inst.weight_matrix.nrows)
        ) and dot(inst.profits, x) >= inst.target:
            out.append(x)
    return tuple(out)


def subsetsum_solutions(inst: SubsetSumInstance) -> tuple[IntVector, ...]:
    return tuple(
        x for x in _all_subsets(len(inst.values)) if dot(inst.values, x) == inst.target
    )
