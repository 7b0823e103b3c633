"""Minimal equivalent vectors over bounded integer boxes.

Two weight vectors are order-equivalent on the box [-d, d]^N when they rank
every pair of box points the same way; equivalently, every difference vector
z in [-2d, 2d]^N gets the same "is the dot product >= 0" verdict from both.
This module materializes the normal set of that relation (the equivalence
cone), reduces a vector to an l1-minimal equivalent one, and cross-checks the
reduction through an independent generator-sum construction.

The reducer solves the natural integer program "minimize the l1-norm subject
to lying strictly inside the cone" without ever materializing all (4d+1)^N
cone constraints: it lazily generates violated constraints with an exact
separation oracle (direct scan on small boxes, a sorted meet-in-the-middle
split on larger ones). Any pool optimum that survives a full separation sweep
is an optimum of the complete system, so the lazy path returns exactly the
same canonical vector the exhaustive one would.

Practical scaling: vectors whose coordinates are tied by many proportionality
relations (geometric chains, repeated entries) reduce quickly at any
dimension the separator can afford, because the sparse null seed pins them in
one round. Generic dense vectors in dimension >= 8 can need constraint pools
with hundreds of rows and correspondingly slow exact LP/ILP solves; budget
accordingly.
"""

from __future__ import annotations

import itertools
import warnings
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol, Sequence

from .budget import (
    CONE_POINT_BUDGET,
    BudgetError,
    InputError,
    VerificationError,
    resolve_budget,
)
from .exactmath import (
    IntMatrix,
    IntVector,
    cramer_solve,
    det,
    dot,
    hadamard_l1_bound,
    isqrt_ceil,
    l1_norm,
    primitive_direction,
)
from .ilpcore import INFEASIBLE, FeasIlp, solve_ilp
from .lpcore import LpVertex, StandardLp, solve_vertex

__all__ = [
    "EquivCone",
    "ReducedVector",
    "reduced_norm_bound",
    "build_cone",
    "check_equivalent",
    "find_violation",
    "enumerate_generators",
    "reduce_vector",
    "reduce_vector_generator_sum",
    "min_equivalent_norm",
]


def reduced_norm_bound(n_dim: int, delta: int) -> int:
    """Smallest integer >= N^2 (2 sqrt(N) d)^(N-1): the l1 cap on reductions.

    Evaluated exactly as ceil(sqrt(4^(N-1) N^(N+3) d^(2N-2))).
    """
    if n_dim < 1 or delta < 1:
        raise InputError("dimension and radius must be >= 1")
    return isqrt_ceil(4 ** (n_dim - 1) * n_dim ** (n_dim + 3) * delta ** (2 * (n_dim - 1)))


@dataclass(frozen=True)
class EquivCone:
    """Normals of the order-equivalence relation of ``base`` on [-radius, radius]^dim.

    strict_normals hold z with base.z > 0 (one per {z, -z} pair is *not*
    deduplicated: every strict z appears, null pairs appear sign-normalized
    once), null_normals hold z with base.z = 0; both lexicographically sorted.
    """

    dim: int
    radius: int
    base: IntVector
    strict_normals: tuple[IntVector, ...]
    null_normals: tuple[IntVector, ...]

    def matrix(self) -> IntMatrix:
        """All facet rows as >=0 constraints: strict, null and negated null."""
        rows = list(self.strict_normals)
        rows.extend(self.null_normals)
        rows.extend(tuple(-v for v in z) for z in self.null_normals)
        if not rows:
            rows = [(0,) * self.dim]
        return IntMatrix.from_rows(rows)


@dataclass(frozen=True)
class ReducedVector:
    """Outcome of an l1-minimization over the equivalence class."""

    original: IntVector
    reduced: IntVector
    radius: int
    l1_norm: int
    verified: bool


def _box_points(dim: int, radius: int) -> Iterable[IntVector]:
    """All z in [-2*radius, 2*radius]^dim in lexicographic order."""
    return itertools.product(range(-2 * radius, 2 * radius + 1), repeat=dim)


def build_cone(w: Sequence[int], delta: int, budget: Optional[int] = None) -> EquivCone:
    """Classify every difference vector against w: strictly positive or null."""
    w = tuple(int(v) for v in w)
    n = len(w)
    if n < 1 or delta < 1:
        raise InputError("need a nonempty vector and radius >= 1")
    cap = resolve_budget(budget, CONE_POINT_BUDGET)
    count = (4 * delta + 1) ** n
    if count > cap:
        raise BudgetError(f"cone has {count} candidate points, budget {cap}")
    strict: list[IntVector] = []
    null: list[IntVector] = []
    for z in _box_points(n, delta):
        s = dot(w, z)
        if s > 0:
            strict.append(z)
        elif s == 0 and any(z):
            if next(v for v in z if v) > 0:  # keep one of each +-z pair
                null.append(z)
    return EquivCone(
        dim=n,
        radius=delta,
        base=w,
        strict_normals=tuple(strict),
        null_normals=tuple(null),
    )


class Separator(Protocol):
    """Exact violation oracle for one fixed base vector."""

    def find(self, cand: Sequence) -> Optional[IntVector]:
        """Some z with sign mismatch against the base, or None if equivalent."""

    def find_batch(self, cand: Sequence, limit: int) -> list[IntVector]:
        """Up to ``limit`` violations (empty list means none exist at all)."""


class BoxSeparator:
    """Violation search over the full difference box [-2d, 2d]^N.

    Direct lexicographic scan when the box fits the budget; otherwise an exact
    meet-in-the-middle split: the right half is enumerated once and sorted by
    its base dot value, each query recomputes candidate dot values and answers
    both mismatch classes with suffix-min / prefix-max sweeps.
    """

    def __init__(self, w: Sequence[int], delta: int, budget: Optional[int] = None):
        self.w = tuple(int(v) for v in w)
        self.delta = delta
        n = len(self.w)
        cap = resolve_budget(budget, CONE_POINT_BUDGET)
        side = 4 * delta + 1
        if side**n <= cap:
            self.mode = "direct"
            self.zs = tuple(_box_points(n, delta))
            self.wdots = tuple(dot(self.w, z) for z in self.zs)
            return
        n1 = n // 2
        if side ** (n - n1) > cap:
            raise BudgetError(
                f"difference box 5^{n}-scale exceeds budget even split in half"
            )
        self.mode = "halves"
        self.left = tuple(itertools.product(range(-2 * delta, 2 * delta + 1), repeat=n1))
        self.left_w = tuple(dot(self.w[:n1], z) for z in self.left)
        right = list(itertools.product(range(-2 * delta, 2 * delta + 1), repeat=n - n1))
        wr = self.w[n1:]
        right.sort(key=lambda z: dot(wr, z))
        self.right = tuple(right)
        self.right_w = tuple(dot(wr, z) for z in self.right)

    def find(self, cand: Sequence) -> Optional[IntVector]:
        hits = self.find_batch(cand, 1)
        return hits[0] if hits else None

    def find_batch(self, cand: Sequence, limit: int) -> list[IntVector]:
        out: list[IntVector] = []
        if self.mode == "direct":
            for z, a in zip(self.zs, self.wdots):
                if (a >= 0) != (dot(cand, z) >= 0):
                    out.append(z)
                    if len(out) >= limit:
                        break
            return out
        n1 = len(self.left[0])
        cl, cr = cand[:n1], cand[n1:]
        right_c = [dot(cr, z) for z in self.right]
        m = len(right_c)
        # suffix minimum of candidate dots (with argmin) over base-sorted order
        suf_min = [right_c[0]] * m
        suf_arg = [0] * m
        best, arg = right_c[m - 1], m - 1
        for i in range(m - 1, -1, -1):
            if right_c[i] <= best:
                best, arg = right_c[i], i
            suf_min[i], suf_arg[i] = best, arg
        pre_max = [right_c[0]] * m
        pre_arg = [0] * m
        best, arg = right_c[0], 0
        for i in range(m):
            if right_c[i] >= best:
                best, arg = right_c[i], i
            pre_max[i], pre_arg[i] = best, arg
        for z1, a1 in zip(self.left, self.left_w):
            b1 = dot(cl, z1)
            # class A: base.z >= 0 but cand.z < 0
            i = bisect_left(self.right_w, -a1)
            if i < m and suf_min[i] + b1 < 0:
                out.append(z1 + self.right[suf_arg[i]])
                if len(out) >= limit:
                    return out
                continue  # at most one hit per left half keeps the batch diverse
            # class B: base.z < 0 but cand.z >= 0
            if i > 0 and pre_max[i - 1] + b1 >= 0:
                out.append(z1 + self.right[pre_arg[i - 1]])
                if len(out) >= limit:
                    return out
        return out


def find_violation(
    w: Sequence[int], w_bar: Sequence[int], delta: int, budget: Optional[int] = None
) -> Optional[IntVector]:
    """First difference vector ranked differently by w and w_bar, if any."""
    w = tuple(int(v) for v in w)
    w_bar = tuple(int(v) for v in w_bar)
    if len(w) != len(w_bar):
        raise InputError("vectors must share a dimension")
    if len(w) < 1 or delta < 1:
        raise InputError("need a nonempty vector and radius >= 1")
    return BoxSeparator(w, delta, budget).find(w_bar)


def check_equivalent(
    w: Sequence[int], w_bar: Sequence[int], delta: int, budget: Optional[int] = None
) -> bool:
    """Do w and w_bar rank every pair of points of [-delta, delta]^N identically?"""
    return find_violation(w, w_bar, delta, budget) is None


# ---------------------------------------------------------------------------
# l1 minimization by lazy constraint generation
# ---------------------------------------------------------------------------


def _sparse_box_vectors(n: int, delta: int) -> Iterable[IntVector]:
    """All z in [-2d, 2d]^n with one or two nonzero coordinates, fixed order."""
    lo, hi = -2 * delta, 2 * delta
    coeffs = [c for c in range(lo, hi + 1) if c]
    for i in range(n):
        for a in coeffs:
            yield tuple(a if t == i else 0 for t in range(n))
    for i in range(n):
        for j in range(i + 1, n):
            for a in coeffs:
                for b in coeffs:
                    yield tuple(a if t == i else b if t == j else 0 for t in range(n))


def _minimize_over_cone(
    w: IntVector,
    box_bound: int,
    separator: Separator,
    delta: int,
    max_rounds: int = 10_000,
    prescan: bool = True,
) -> IntVector:
    """l1-minimal vector giving every separator-visible z the same verdict as w.

    Variables are magnitudes on the support of w (equivalent vectors share
    w's sign pattern: the unit difference vectors force it), capped by
    ``box_bound``. Constraint rows are generated lazily: cheap LP rounds cut
    off fractional optima first, the exact branch-and-bound runs only on pool
    states whose LP optimum already survives separation, and each round adds
    a batch of violated rows (sparse two-coordinate vectors are scanned ahead
    of the full oracle -- they pin chain structure like doubling relations in
    one round). A candidate with no violation anywhere is optimal for the
    full system; a final lex pass makes the tie-break canonical.
    """
    n = len(w)
    supp = tuple(i for i, v in enumerate(w) if v)
    signs = tuple(1 if w[i] > 0 else -1 for i in supp)
    k = len(supp)
    strict: list[IntVector] = [
        tuple(signs[j] if i == supp[j] else 0 for i in range(n)) for j in range(k)
    ]
    seeds = set(strict)
    null: list[IntVector] = []
    seen: set[IntVector] = set(strict)
    batch_cap = max(12, 3 * k)
    # Constraint-pool aging: rows that stay slack at consecutive LP optima get
    # dropped (and forgotten, so separation may bring them back). The pool is
    # always a subset of the true constraints, so any separation-clean pool
    # optimum is still an optimum of the full system; aging only trims the
    # tableau the exact solvers have to carry.
    age: dict[IntVector, int] = {}

    # Pre-scored sparse difference vectors (valid constraints only when the
    # separator's difference set is the full box, hence the prescan switch).
    sparse = (
        [(z, dot(w, z)) for z in _sparse_box_vectors(n, delta)] if prescan else []
    )

    def normalize(z: IntVector, s) -> IntVector:
        if s < 0:
            return tuple(-v for v in z)
        if s == 0:
            lead = next(v for v in z if v)
            return tuple(-v for v in z) if lead < 0 else z
        return z

    def record(z: IntVector, known_ok: bool = False) -> bool:
        s = dot(w, z)
        zz = normalize(z, s)
        if zz in seen:
            if known_ok:
                return False
            raise VerificationError("separation returned a known constraint")
        seen.add(zz)
        (null if s == 0 else strict).append(zz)
        return True

    # Seed every sparse null relation up front: equality rows cost no slack
    # column and instantly pin proportional structure.
    for z, s in sparse:
        if s == 0:
            record(z, known_ok=True)

    def violations(cand: Sequence) -> list[IntVector]:
        hits: list[IntVector] = []
        for z, s in sparse:
            if (s >= 0) != (dot(cand, z) >= 0):
                zz = normalize(z, s)
                if zz not in seen and zz not in hits:
                    hits.append(zz)
                    if len(hits) >= batch_cap:
                        return hits
        if hits:
            return hits
        return separator.find_batch(cand, batch_cap)

    def pool_rows(extra_row: Optional[tuple[IntVector, int]] = None):
        rows: list[list[int]] = []
        b: list[int] = []
        n_slack = len(strict)
        for r, z in enumerate(strict):
            row = [z[i] * s for i, s in zip(supp, signs)]
            row.extend(-1 if t == r else 0 for t in range(n_slack))
            rows.append(row)
            b.append(1)
        for z in null:
            row = [z[i] * s for i, s in zip(supp, signs)]
            row.extend([0] * n_slack)
            rows.append(row)
            b.append(0)
        if extra_row is not None:
            coeffs, rhs = extra_row
            rows.append(list(coeffs) + [0] * n_slack)
            b.append(rhs)
        upper: tuple[Optional[int], ...] = (box_bound,) * k + (None,) * n_slack
        return IntMatrix.from_rows(rows), tuple(b), upper, n_slack

    def embed(y: Sequence) -> tuple:
        out = [0] * n
        for j, i in enumerate(supp):
            out[i] = signs[j] * y[j]
        return tuple(out)

    def trim(cand) -> None:
        if len(strict) <= 3 * k + len(seeds):
            return
        keep: list[IntVector] = []
        for z in strict:
            if z in seeds:
                keep.append(z)
                continue
            if dot(cand, z) > 1:
                age[z] = age.get(z, 0) + 1
            else:
                age[z] = 0
            if age[z] >= 2:
                seen.discard(z)
                age.pop(z)
            else:
                keep.append(z)
        strict[:] = keep

    for _ in range(max_rounds):
        a, b, upper, n_slack = pool_rows()
        objective = (1,) * k + (0,) * n_slack
        # The LP can run without the variable caps: y >= 0 keeps the
        # minimization bounded and no coordinate of an optimal point can
        # exceed the optimal objective value, which the caps dominate.
        lp = solve_vertex(
            StandardLp(a=a, b=b, upper=(None,) * (k + n_slack), objective=objective)
        )
        if not isinstance(lp, LpVertex):
            raise VerificationError("equivalence system relaxation went infeasible")
        lp_cand = embed(lp.values[:k])
        trim(lp_cand)
        hits = violations(lp_cand)
        if hits:
            for z in hits:
                record(z, known_ok=True)
            continue
        ilp = FeasIlp(a=a, b=b, lower=(0,) * (k + n_slack), upper=upper)
        y = solve_ilp(ilp, objective=objective)
        if y is INFEASIBLE:
            raise VerificationError("equivalence system relaxation went infeasible")
        cand = embed(y[:k])
        hits = violations(cand)
        if hits:
            for z in hits:
                record(z, known_ok=True)
            continue
        # Canonical tie-break: lexicographically smallest among pool optima
        # with the optimal value pinned by an equality row.
        value = sum(y[:k])
        a2, b2, upper2, n_slack2 = pool_rows(extra_row=((1,) * k, value))
        pinned = FeasIlp(a=a2, b=b2, lower=(0,) * (k + n_slack2), upper=upper2)
        y2 = solve_ilp(pinned, objective=(1,) * k + (0,) * n_slack2, lex_tiebreak=True)
        assert y2 is not INFEASIBLE
        cand2 = embed(y2[:k])
        if cand2 == cand:
            return cand
        z = separator.find(cand2)
        if z is None:
            return cand2
        record(z)
    raise BudgetError(f"constraint generation did not converge in {max_rounds} rounds")


def reduce_vector(
    w: Sequence[int], delta: int, budget: Optional[int] = None
) -> ReducedVector:
    """l1-minimal vector equivalent to w on [-delta, delta]^N, fully verified."""
    w = tuple(int(v) for v in w)
    n = len(w)
    if n < 1 or delta < 1:
        raise InputError("need a nonempty vector and radius >= 1")
    if not any(w):
        return ReducedVector(w, w, delta, 0, True)
    separator = BoxSeparator(w, delta, budget)
    bound = reduced_norm_bound(n, delta)
    reduced = _minimize_over_cone(w, bound, separator, delta)
    norm = l1_norm(reduced)
    if norm > min(bound, l1_norm(w)):
        raise VerificationError("reduction exceeded its proven norm bound")
    return ReducedVector(
        original=w, reduced=reduced, radius=delta, l1_norm=norm, verified=True
    )


# ---------------------------------------------------------------------------
# generator enumeration (the independent cross-check construction)
# ---------------------------------------------------------------------------


def enumerate_generators(
    a: IntMatrix, budget: Optional[int] = None
) -> tuple[IntVector, ...]:
    """Candidate extreme rays of {x : a x >= 0} by Cramer solves on row subsets.

    Takes every linearly independent choice of N rows of (a; I), solves
    B x = +-e_j exactly, scales to the integer lattice, keeps the vectors that
    satisfy all cone rows, and returns the primitive representatives sorted.
    Every returned vector obeys the Hadamard-style l1 cap
    hadamard_l1_bound(N, max(inf_norm, 1)).
    """
    n = a.ncols
    if n < 1:
        raise InputError("cone dimension must be >= 1")
    cap = resolve_budget(budget, CONE_POINT_BUDGET)
    pool: list[IntVector] = list(a.iter_rows())
    pool.extend(IntMatrix.identity(n).iter_rows())
    from math import comb

    work = comb(len(pool), n) * 2 * n
    if work > cap:
        raise BudgetError(f"{work} Cramer solves needed, budget {cap}")
    bound = hadamard_l1_bound(n, max(a.inf_norm(), 1))
    rows = [a.row(i) for i in range(a.nrows)]
    found: set[IntVector] = set()
    for subset in itertools.combinations(range(len(pool)), n):
        b = IntMatrix.from_rows([pool[i] for i in subset])
        if det(b) == 0:
            continue
        for j in range(n):
            for sgn in (1, -1):
                rhs = tuple(sgn if t == j else 0 for t in range(n))
                _, scaled, _ = cramer_solve(b, rhs)
                if not any(scaled):
                    continue
                if all(dot(r, scaled) >= 0 for r in rows):
                    if l1_norm(scaled) > bound:
                        raise VerificationError(
                            "generator exceeded the Hadamard-style l1 bound"
                        )
                    found.add(primitive_direction(scaled))
    return tuple(sorted(found))


def _independent_subset(vectors: Sequence[IntVector]) -> list[IntVector]:
    """Greedy maximal linearly independent subset (exact rational elimination)."""
    from fractions import Fraction

    basis: list[list[Fraction]] = []
    chosen: list[IntVector] = []
    for v in vectors:
        row = [Fraction(x) for x in v]
        for piv in basis:
            lead = next((i for i, x in enumerate(piv) if x), None)
            if lead is not None and row[lead]:
                f = row[lead] / piv[lead]
                row = [x - f * y for x, y in zip(row, piv)]
        if any(row):
            basis.append(row)
            chosen.append(v)
    return chosen


def reduce_vector_generator_sum(
    w: Sequence[int], delta: int, budget: Optional[int] = None
) -> IntVector:
    """Sum of a maximal independent set of cone generators: an equivalent-vector
    candidate built without any optimization, used to cross-check reduce_vector.

    The result is always checked; a failed check is reported as a warning (the
    construction is a heuristic witness, the ILP route is authoritative).
    """
    w = tuple(int(v) for v in w)
    cone = build_cone(w, delta, budget)
    if not any(w):
        return w
    gens = enumerate_generators(cone.matrix(), budget)
    inside = _independent_subset(gens)
    total = tuple(sum(v[i] for v in inside) for i in range(len(w)))
    if not check_equivalent(w, total, delta, budget):
        warnings.warn(
            f"generator sum {total} is not equivalent to {w} at radius {delta}",
            stacklevel=2,
        )
    return total


def min_equivalent_norm(
    w: Sequence[int], delta: int, budget: Optional[int] = None, cap: Optional[int] = None
) -> int:
    """Exact minimum l1-norm over all vectors equivalent to w (brute shells).

    Independent of reduce_vector: walks norm shells upward, enumerating only
    sign-aligned candidates (unit difference vectors force the sign pattern),
    and returns the first shell containing an equivalent vector. ``cap``
    defaults to ||w||_1, which always terminates since w is self-equivalent.
    """
    w = tuple(int(v) for v in w)
    if not any(w):
        return 0
    separator = BoxSeparator(w, delta, budget)
    supp = tuple(i for i, v in enumerate(w) if v)
    signs = tuple(1 if w[i] > 0 else -1 for i in supp)
    top = l1_norm(w) if cap is None else cap

    def compositions(total: int, parts: int):
        """All positive integer tuples of the given length summing to total."""
        if parts == 1:
            yield (total,)
            return
        for first in range(1, total - parts + 2):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for norm in range(len(supp), top + 1):
        for y in compositions(norm, len(supp)):
            cand = [0] * len(w)
            for j, i in enumerate(supp):
                cand[i] = signs[j] * y[j]
            if separator.find(tuple(cand)) is None:
                return norm
    raise VerificationError(f"no equivalent vector found with l1-norm <= {top}")
