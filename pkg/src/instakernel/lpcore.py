"""Exact rational linear programming over equality systems.

``solve_vertex`` runs a two-phase primal simplex on Ax = b, 0 <= x (<= upper)
entirely in `fractions.Fraction`, with Bland's rule for anti-cycling and a
bounded-variable extension so upper bounds never need explicit slack rows.
Deterministic by construction: lowest eligible index enters, lowest variable
index among blocking constraints leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .budget import InputError
from .exactmath import IntMatrix, IntVector, RatVector


class _Infeasible:
    """Marker: the constraint system has no feasible point."""

    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "INFEASIBLE"


class _Unbounded:
    """Marker: the objective is unbounded below on the feasible region."""

    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "UNBOUNDED"


INFEASIBLE = _Infeasible()
UNBOUNDED = _Unbounded()


@dataclass(frozen=True)
class StandardLp:
    """min objective . x  s.t.  a x = b, 0 <= x, optionally x <= upper.

    upper entries may be None (no cap on that variable); objective None means
    "any feasible vertex".
    """

    a: IntMatrix
    b: IntVector
    upper: Optional[tuple[Optional[int], ...]] = None
    objective: Optional[IntVector] = None

    def __post_init__(self) -> None:
        if len(self.b) != self.a.nrows:
            raise InputError("rhs length must match row count")
        if self.upper is not None and len(self.upper) != self.a.ncols:
            raise InputError("upper bound length must match column count")
        if self.objective is not None and len(self.objective) != self.a.ncols:
            raise InputError("objective length must match column count")
        if self.upper is not None:
            for u in self.upper:
                if u is not None and u < 0:
                    raise InputError("upper bounds must be nonnegative")


@dataclass(frozen=True)
class LpVertex:
    """A basic feasible (optimal, if an objective was given) solution."""

    values: RatVector
    basis: frozenset[int]
    objective_value: Optional[Fraction] = None


LpResult = Union[LpVertex, _Infeasible, _Unbounded]


class _Simplex:
    """Dense bounded-variable simplex state over Fractions."""

    def __init__(self, a: IntMatrix, b: IntVector, upper: Sequence[Optional[int]]):
        self.n_struct = a.ncols
        m = a.nrows
        self.upper: list[Optional[Fraction]] = [
            None if u is None else Fraction(u) for u in upper
        ] + [None] * m
        # Sign-normalize rows so the artificial start basis is feasible.
        self.tab: list[list[Fraction]] = []
        self.beta: list[Fraction] = []
        self.basis: list[int] = []
        for i in range(m):
            row = [Fraction(v) for v in a.row(i)]
            rhs = Fraction(b[i])
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
            row.extend(Fraction(1) if k == i else Fraction(0) for k in range(m))
            self.tab.append(row)
            self.beta.append(rhs)
            self.basis.append(self.n_struct + i)
        self.at_upper: set[int] = set()
        self.ncols = self.n_struct + m

    # -- dictionary queries -------------------------------------------------

    def value_of(self, j: int) -> Fraction:
        for i, bj in enumerate(self.basis):
            if bj == j:
                return self.beta[i]
        if j in self.at_upper:
            u = self.upper[j]
            assert u is not None
            return u
        return Fraction(0)

    def _reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        m = len(self.basis)
        red = list(cost)
        for i in range(m):
            cb = cost[self.basis[i]]
            if cb:
                row = self.tab[i]
                for j in range(self.ncols):
                    if row[j]:
                        red[j] -= cb * row[j]
        return red

    # -- pivoting -----------------------------------------------------------

    def _pivot(
        self, row: int, col: int, t: Fraction, from_upper: bool, leaves_at_upper: bool
    ) -> None:
        """Move entering variable ``col`` by step t and make it basic in ``row``.

        ``leaves_at_upper`` names the bound that blocked the step (the caller
        knows it from the ratio test; inferring it from signs mislabels
        degenerate pivots).
        """
        leaving = self.basis[row]
        coldir = [self.tab[i][col] for i in range(len(self.tab))]
        if from_upper:
            for i in range(len(self.beta)):
                self.beta[i] += coldir[i] * t
            new_value = self.upper[col] - t  # type: ignore[operator]
        else:
            for i in range(len(self.beta)):
                self.beta[i] -= coldir[i] * t
            new_value = t
        if leaves_at_upper:
            self.at_upper.add(leaving)
        else:
            self.at_upper.discard(leaving)
        self.at_upper.discard(col)
        piv = self.tab[row][col]
        self.tab[row] = [v / piv for v in self.tab[row]]
        for i in range(len(self.tab)):
            if i != row and self.tab[i][col]:
                f = self.tab[i][col]
                self.tab[i] = [v - f * w for v, w in zip(self.tab[i], self.tab[row])]
        self.basis[row] = col
        self.beta[row] = new_value

    def _flip(self, col: int) -> None:
        """Nonbasic variable jumps between its two bounds."""
        u = self.upper[col]
        assert u is not None
        if col in self.at_upper:
            for i in range(len(self.beta)):
                self.beta[i] += self.tab[i][col] * u
            self.at_upper.discard(col)
        else:
            for i in range(len(self.beta)):
                self.beta[i] -= self.tab[i][col] * u
            self.at_upper.add(col)

    # -- the main loop ------------------------------------------------------

    def optimize(self, cost: Sequence[Fraction], allowed: int) -> bool:
        """Minimize cost over the current dictionary (Bland's rule).

        ``allowed``: only columns < allowed may enter (used to freeze
        artificials out of phase 2). Returns False iff unbounded.
        """
        basic = set(self.basis)
        while True:
            red = self._reduced_costs(cost)
            enter = -1
            from_upper = False
            for j in range(allowed):
                if j in basic:
                    continue
                if j in self.at_upper:
                    if red[j] > 0:
                        enter = j
                        from_upper = True
                        break
                elif red[j] < 0:
                    enter = j
                    from_upper = False
                    break
            if enter < 0:
                return True
            # Ratio test: largest step t >= 0 keeping every variable in range.
            best_t: Optional[Fraction] = None
            best_var = -1
            best_row = -1
            best_hits_upper = False
            ue = self.upper[enter]
            if ue is not None:
                best_t, best_var, best_row = ue, enter, -1
            for i in range(len(self.tab)):
                coef = self.tab[i][enter]
                if not coef:
                    continue
                shrink = (coef > 0) != from_upper  # does this basic decrease?
                if shrink:
                    t = self.beta[i] / abs(coef)
                else:
                    ub = self.upper[self.basis[i]]
                    if ub is None:
                        continue
                    t = (ub - self.beta[i]) / abs(coef)
                if best_t is None or t < best_t or (t == best_t and self.basis[i] < best_var):
                    best_t, best_var, best_row = t, self.basis[i], i
                    best_hits_upper = not shrink
            if best_t is None:
                return False
            if best_row < 0:
                self._flip(enter)
            else:
                basic.discard(self.basis[best_row])
                basic.add(enter)
                self._pivot(best_row, enter, best_t, from_upper, best_hits_upper)

    def drive_out_artificials(self) -> None:
        """Pivot zero-valued artificials out of the basis; drop redundant rows."""
        i = 0
        while i < len(self.basis):
            if self.basis[i] < self.n_struct:
                i += 1
                continue
            row = self.tab[i]
            col = next((j for j in range(self.n_struct) if row[j] != 0), -1)
            if col < 0:
                del self.tab[i], self.beta[i], self.basis[i]
                continue
            # Zero-step pivot: the artificial sits at 0, so it leaves at lower.
            self._pivot(i, col, Fraction(0), col in self.at_upper, leaves_at_upper=False)
            i += 1

    def strip_artificials(self) -> None:
        self.tab = [row[: self.n_struct] for row in self.tab]
        self.ncols = self.n_struct


def solve_vertex(lp: StandardLp) -> LpResult:
    """Exact two-phase simplex; returns an optimal vertex, INFEASIBLE or UNBOUNDED."""
    n = lp.a.ncols
    m = lp.a.nrows
    upper: Sequence[Optional[int]] = lp.upper if lp.upper is not None else (None,) * n
    sx = _Simplex(lp.a, lp.b, upper)

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    sx.optimize(phase1, allowed=sx.ncols)
    total = sum(
        (sx.beta[i] for i in range(len(sx.basis)) if sx.basis[i] >= n), Fraction(0)
    )
    if total != 0:
        return INFEASIBLE
    sx.drive_out_artificials()
    sx.strip_artificials()

    if lp.objective is not None:
        cost = [Fraction(c) for c in lp.objective]
        if not sx.optimize(cost, allowed=n):
            return UNBOUNDED

    values = tuple(sx.value_of(j) for j in range(n))
    basis = frozenset(j for j in sx.basis if j < n)
    obj_val = None
    if lp.objective is not None:
        obj_val = sum(
            (Fraction(c) * v for c, v in zip(lp.objective, values)), Fraction(0)
        )
    return LpVertex(values=values, basis=basis, objective_value=obj_val)
