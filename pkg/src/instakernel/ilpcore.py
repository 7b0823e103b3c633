"""Exact integer feasibility and optimization over equality systems.

Two engines, deliberately different, so each can serve as a check on the other:

* ``solve_ilp`` -- branch and bound on the exact LP relaxation (lpcore),
  branching on the lowest-index fractional variable, floor side first.
* ``enumerate_feasible`` -- direct lattice-box recursion with interval,
  divisibility and row-combination pruning; canonical lexicographic output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .budget import BOX_ENUM_BUDGET, ILP_NODE_BUDGET, BudgetError, InputError, resolve_budget
from .exactmath import IntMatrix, IntVector, floor_frac
from .lpcore import INFEASIBLE, UNBOUNDED, LpVertex, StandardLp, solve_vertex

__all__ = [
    "FeasIlp",
    "InfeasibleVerdict",
    "solve_ilp",
    "enumerate_feasible",
    "INFEASIBLE",
]

Bound = Optional[int]


@dataclass(frozen=True)
class InfeasibleVerdict:
    """A definitive 'no solution' answer with its provenance."""

    reason: str


@dataclass(frozen=True)
class FeasIlp:
    """Integer feasibility system  a x = b,  lower <= x <= upper (componentwise).

    ``lower`` defaults to all zeros; ``upper`` may be None (no caps) or contain
    None entries for individually uncapped variables.
    """

    a: IntMatrix
    b: IntVector
    lower: IntVector = ()
    upper: Optional[tuple[Bound, ...]] = None

    def __post_init__(self) -> None:
        if len(self.b) != self.a.nrows:
            raise InputError("rhs length must match row count")
        if not self.lower:
            object.__setattr__(self, "lower", (0,) * self.a.ncols)
        if len(self.lower) != self.a.ncols:
            raise InputError("lower bound length must match column count")
        if self.upper is not None:
            if len(self.upper) != self.a.ncols:
                raise InputError("upper bound length must match column count")
            for lo, up in zip(self.lower, self.upper):
                if up is not None and up < lo:
                    raise InputError("upper bound below lower bound")

    def effective_upper(self) -> tuple[Bound, ...]:
        return self.upper if self.upper is not None else (None,) * self.a.ncols

    def is_solution(self, x: IntVector) -> bool:
        if len(x) != self.a.ncols:
            return False
        for xi, lo in zip(x, self.lower):
            if xi < lo:
                return False
        if self.upper is not None:
            for xi, up in zip(x, self.upper):
                if up is not None and xi > up:
                    return False
        return self.a.mat_vec(x) == tuple(self.b)

    def bit_scalars(self):
        yield self.a
        yield self.b
        yield self.lower
        if self.upper is not None:
            yield tuple(u for u in self.upper if u is not None)


def _lex_weights(lower: IntVector, upper: tuple[Bound, ...]) -> tuple[list[int], int]:
    """Positional weights turning bounded coordinates into one lex-ordering key.

    Variables without a finite range get weight 0 (callers only ask for lex
    canonicalization over fully bounded coordinates -- slack columns ride along).
    """
    n = len(lower)
    spans = []
    for lo, up in zip(lower, upper):
        spans.append(None if up is None else up - lo + 1)
    weights = [0] * n
    acc = 1
    for j in range(n - 1, -1, -1):
        if spans[j] is None:
            continue
        weights[j] = acc
        acc *= spans[j]
    return weights, acc


def solve_ilp(
    ilp: FeasIlp,
    objective: Optional[IntVector] = None,
    box: Optional[IntVector] = None,
    node_budget: Optional[int] = None,
    lex_tiebreak: bool = False,
):
    """Exact branch and bound.

    With an objective: returns a minimizing integer point (with
    ``lex_tiebreak`` the lexicographically smallest one among all optima,
    ranked over the finitely-bounded coordinates). Without an objective:
    returns the first integral point in canonical branch order (requires a
    fully finite box). Returns INFEASIBLE when no integer point exists.

    Variables with ``upper`` None are allowed only when they are implied
    integral by the bounded ones (e.g. slack columns of integer rows);
    branching never needs to touch them in that case.
    """
    n = ilp.a.ncols
    budget = resolve_budget(node_budget, ILP_NODE_BUDGET)
    upper = list(ilp.effective_upper())
    if box is not None:
        if len(box) != n:
            raise InputError("box length must match column count")
        for j, cap in enumerate(box):
            if cap is not None and (upper[j] is None or cap < upper[j]):
                upper[j] = cap
    lower = ilp.lower
    for lo, up in zip(lower, upper):
        if up is not None and up < lo:
            return INFEASIBLE
    if objective is None and any(u is None for u in upper):
        raise InputError("feasibility search needs a finite box")
    if objective is not None and len(objective) != n:
        raise InputError("objective length must match column count")

    if objective is not None and lex_tiebreak:
        weights, _ = _lex_weights(lower, tuple(upper))
        big = sum(w * (u - l) for w, u, l in zip(weights, upper, lower) if u is not None) + 1
        cost = tuple(c * big + w for c, w in zip(objective, weights))
    else:
        cost = objective

    best_x: Optional[IntVector] = None
    best_val: Optional[int] = None  # value in 'cost' units
    stack: list[tuple[tuple[int, ...], tuple[Bound, ...]]] = [(tuple(lower), tuple(upper))]
    nodes = 0
    while stack:
        lo, up = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetError(f"branch-and-bound exceeded {budget} nodes")
        shifted_b = tuple(
            bi - sum(ilp.a.entry(i, j) * lo[j] for j in range(n))
            for i, bi in enumerate(ilp.b)
        )
        spans = tuple(None if u is None else u - l for l, u in zip(lo, up))
        lp = StandardLp(
            a=ilp.a,
            b=shifted_b,
            upper=spans,
            objective=tuple(cost) if cost is not None else None,
        )
        res = solve_vertex(lp)
        if res is INFEASIBLE:
            continue
        if res is UNBOUNDED:
            raise InputError("objective unbounded below on the relaxation")
        assert isinstance(res, LpVertex)
        if cost is not None and best_val is not None:
            const = sum(c * l for c, l in zip(cost, lo))
            lp_bound = res.objective_value + const
            # Integer costs: any point in this node has value >= ceil(bound).
            # Equal-value nodes cannot improve (in lex mode keys are unique,
            # in plain mode any optimum is an acceptable witness), so prune >=.
            if -floor_frac(-lp_bound) >= best_val:
                continue
        frac_j = next(
            (j for j, v in enumerate(res.values) if v.denominator != 1), -1
        )
        if frac_j < 0:
            x = tuple(l + int(v) for l, v in zip(lo, res.values))
            if cost is None:
                return x
            val = sum(c * xi for c, xi in zip(cost, x))
            # In lex mode equal values mean the identical point, so a strict
            # improvement test keeps exactly the canonical optimum.
            if best_val is None or val < best_val:
                best_val, best_x = val, x
            continue
        v = res.values[frac_j]
        split = lo[frac_j] + floor_frac(v)
        lo_hi = list(up)
        lo_hi[frac_j] = split
        hi_lo = list(lo)
        hi_lo[frac_j] = split + 1
        # push ceil side first so the floor side pops first (DFS)
        if up[frac_j] is None or hi_lo[frac_j] <= up[frac_j]:
            stack.append((tuple(hi_lo), up))
        if split >= lo[frac_j]:
            stack.append((lo, tuple(lo_hi)))
    if best_x is None:
        return INFEASIBLE
    return best_x


def _suffix_bounds(
    coeffs: IntVector, lower: IntVector, upper: IntVector
) -> tuple[list[int], list[int], list[int]]:
    """Per-suffix min/max achievable contribution and gcd for one row."""
    n = len(coeffs)
    mins = [0] * (n + 1)
    maxs = [0] * (n + 1)
    gcds = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        c = coeffs[j]
        a_lo, a_hi = (c * lower[j], c * upper[j]) if c >= 0 else (c * upper[j], c * lower[j])
        mins[j] = mins[j + 1] + a_lo
        maxs[j] = maxs[j + 1] + a_hi
        gcds[j] = math.gcd(gcds[j + 1], c)
    return mins, maxs, gcds


def enumerate_feasible(
    ilp: FeasIlp,
    budget: Optional[int] = None,
    limit: Optional[int] = None,
) -> tuple[IntVector, ...]:
    """All integer solutions in the box, in lexicographic order.

    Without ``limit`` the box volume must fit the budget (the classic
    exhaustive contract). With ``limit`` the recursion stops after that many
    solutions and the budget caps visited nodes instead, which makes "is there
    any solution?" probes cheap on boxes far too large to materialize.
    """
    cap = resolve_budget(budget, BOX_ENUM_BUDGET)
    n = ilp.a.ncols
    lower = ilp.lower
    upper_opt = ilp.effective_upper()
    if any(u is None for u in upper_opt):
        raise InputError("enumeration needs a finite box")
    upper: IntVector = tuple(u for u in upper_opt)  # type: ignore[misc]
    for lo, up in zip(lower, upper):
        if up < lo:
            return ()
    volume = 1
    for lo, up in zip(lower, upper):
        volume *= up - lo + 1
    if limit is None and volume > cap:
        raise BudgetError(f"box volume {volume} exceeds budget {cap}")
    if limit is not None and limit <= 0:
        raise InputError("limit must be positive")

    # Row set: originals plus pairwise sums/differences (pruning only).
    rows: list[tuple[IntVector, int]] = [
        (ilp.a.row(i), ilp.b[i]) for i in range(ilp.a.nrows)
    ]
    if 2 <= len(rows) <= 4:
        base = list(rows)
        for i in range(len(base)):
            for k in range(i + 1, len(base)):
                ri, bi = base[i]
                rk, bk = base[k]
                rows.append((tuple(x + y for x, y in zip(ri, rk)), bi + bk))
                rows.append((tuple(x - y for x, y in zip(ri, rk)), bi - bk))

    pre = [_suffix_bounds(r, lower, upper) for r, _ in rows]
    out: list[IntVector] = []
    x = list(lower)
    visits = 0

    def descend(k: int, sums: list[int]) -> bool:
        """Returns True to abort the whole search (limit reached)."""
        nonlocal visits
        if k == n:
            if all(s == b for s, (_, b) in zip(sums, rows)):
                out.append(tuple(x))
                return limit is not None and len(out) >= limit
            return False
        # Feasibility window for x[k] from every row with a nonzero coefficient.
        lo_k, up_k = lower[k], upper[k]
        for (r, b), (mins, maxs, gcds), s in zip(rows, pre, sums):
            need = b - s
            if need - maxs[k] > 0 or need - mins[k] < 0:
                return False
            g = gcds[k]
            if g == 0:
                if need != 0:
                    return False
                continue
            if need % g:
                return False
            c = r[k]
            if c:
                lo_num = need - maxs[k + 1]
                hi_num = need - mins[k + 1]
                if c > 0:
                    lo_k = max(lo_k, -((-lo_num) // c))
                    up_k = min(up_k, hi_num // c)
                else:
                    lo_k = max(lo_k, -((-hi_num) // c))
                    up_k = min(up_k, lo_num // c)
        for v in range(lo_k, up_k + 1):
            if limit is not None:
                # volume-gated runs are already budgeted; probe runs pay per node
                visits += 1
                if visits > cap:
                    raise BudgetError(f"enumeration visited more than {cap} nodes")
            x[k] = v
            new_sums = [s + r[k] * v for (r, _), s in zip(rows, sums)]
            if descend(k + 1, new_sums):
                return True
        x[k] = lower[k]
        return False

    descend(0, [0] * len(rows))
    return tuple(out)
