"""Feasibility-ILP compression: static equivalents and proximity kernels.

Two compressions for integer feasibility systems a x = b, l <= x <= u.

The *static* route rewrites each constraint through the minimal-equivalent-
vector machinery: the joint vector (a_i; b_i) is reduced over the box of
radius u, which preserves the sign of a_i x - b_i for every x with
``max |x_j| <= u`` and therefore the exact solution set inside that box. The
result is the same system shape with provably small coefficients.

The *proximity* route solves the linear relaxation (x >= 0 standard form),
pre-packs from every coordinate the part that provably appears in some
integral solution near the vertex (``fixed_i = max(0, ceil(x_i*) - P)`` for
the proximity radius P), and keeps a residual instance over the small box
[0, 2P] with a correspondingly small right-hand side. The residual is
feasible exactly when the original is, and ``fixed + residual solution``
always solves the original.

Block-structured systems (a shared first stage feeding independent blocks,
or independent blocks tied by linking rows) compress block by block; a joint
solution is exactly a compatible family of block solutions, so per-block
static equivalence carries over to the assembled system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .budget import InputError, VerificationError
from .equivvec import reduce_vector
from .exactmath import IntMatrix, IntVector, bit_size, ceil_frac, dot
from .ilpcore import FeasIlp, InfeasibleVerdict, enumerate_feasible
from .lpcore import LpVertex, StandardLp, solve_vertex

__all__ = [
    "StaticEquivIlp",
    "ProximityKernel",
    "TwoStageIlp",
    "NFoldIlp",
    "u_bound",
    "static_equiv_ilp",
    "proximity_radius",
    "kernelize_feasibility",
    "equiv_two_stage",
    "equiv_nfold",
    "two_stage_reduced",
    "nfold_reduced",
]


def _system_bits(ilp: FeasIlp) -> int:
    """Encoding size of the constraint data (matrix and rhs; bounds unchanged)."""
    return bit_size(ilp.a) + bit_size(ilp.b)


@dataclass(frozen=True)
class StaticEquivIlp:
    """A same-shape rewrite of a x = b with identical solutions on the u-box.

    ``bit_report`` is (before, after, bound): constraint-data bit sizes of the
    original and reduced systems plus the proven size cap
    4 M (N+1)^2 (1 + ceil(log2((N+1) u))).
    """

    original: FeasIlp
    reduced: FeasIlp
    u_used: int
    bit_report: tuple[int, int, int]


@dataclass(frozen=True)
class ProximityKernel:
    """Pre-packed part plus a small residual system around an LP vertex."""

    fixed: IntVector
    residual: FeasIlp
    proximity: int
    lp_vertex: LpVertex

    def compose(self, residual_solution: IntVector) -> IntVector:
        """Lift a residual solution back to a solution of the original."""
        return tuple(f + x for f, x in zip(self.fixed, residual_solution))


def u_bound(ilp: FeasIlp) -> int:
    """Box radius within which all standard-form solutions are confined.

    N (M ||a||_inf)^(2M+3) (1 + ||b||_inf), evaluated exactly.
    """
    n, m = ilp.a.ncols, ilp.a.nrows
    b_inf = max((abs(v) for v in ilp.b), default=0)
    return n * (m * ilp.a.inf_norm()) ** (2 * m + 3) * (1 + b_inf)


def static_equiv_ilp(
    ilp: FeasIlp,
    u: Optional[int] = None,
    budget: Optional[int] = None,
    verify: bool = False,
) -> StaticEquivIlp:
    """Reduce every row's joint vector (a_i; b_i) over the radius-u box.

    The reduction preserves the verdict of a_i x ? b_i for each x with
    ``max |x_j| <= u``, so the two systems have identical solution sets there.
    Default u is ``max(u_bound(ilp), 1)`` (the formula degenerates to 0 on an
    all-zero matrix, where radius 1 is already sufficient). ``verify=True``
    additionally enumerates both systems over their bound boxes clipped to u
    and insists on elementwise agreement (budget errors propagate on large
    boxes).
    """
    if u is None:
        u = max(u_bound(ilp), 1)
    u = int(u)
    if u < 1:
        raise InputError("box radius u must be at least 1")
    n, m = ilp.a.ncols, ilp.a.nrows
    rows: list[IntVector] = []
    new_b: list[int] = []
    for i in range(m):
        joint = ilp.a.row(i) + (ilp.b[i],)
        red = reduce_vector(joint, u, budget=budget).reduced
        rows.append(red[:-1])
        new_b.append(red[-1])
    reduced = FeasIlp(
        a=IntMatrix.from_rows(rows),
        b=tuple(new_b),
        lower=ilp.lower,
        upper=ilp.upper,
    )
    report = (
        _system_bits(ilp),
        _system_bits(reduced),
        4 * m * (n + 1) ** 2 * (1 + ((n + 1) * u).bit_length()),
    )
    out = StaticEquivIlp(original=ilp, reduced=reduced, u_used=u, bit_report=report)
    if verify:
        if boxed_solutions(ilp, u, budget) != boxed_solutions(reduced, u, budget):
            raise VerificationError("static reduction changed the solution set")
    return out


def boxed_solutions(ilp: FeasIlp, u: int, budget: Optional[int] = None) -> tuple:
    """All solutions with every coordinate clipped to the [-u, u] box."""
    lower = tuple(max(lo, -u) for lo in ilp.lower)
    upper = tuple(
        u if up is None else min(up, u) for up in ilp.effective_upper()
    )
    probe = FeasIlp(a=ilp.a, b=ilp.b, lower=lower, upper=upper)
    return enumerate_feasible(probe, budget=budget)


def proximity_radius(m_rows: int, delta: int) -> int:
    """l1 distance M(2M*delta+1)^M within which an LP vertex has an integral mate."""
    return m_rows * (2 * m_rows * delta + 1) ** m_rows


def kernel_bits_bound(m_rows: int, n_cols: int, delta: int) -> int:
    """Bit-size cap of any kernel residual with these dimensions.

    Matrix entries keep magnitude <= delta, the shifted rhs stays within
    N*delta*P, bounds are 0 and 2P; accounted like ``bit_size``.
    """
    radius = proximity_radius(m_rows, delta)
    entry = 1 + delta.bit_length()
    rhs = 1 + (n_cols * delta * radius).bit_length()
    box = 1 + (2 * radius).bit_length()
    return m_rows * n_cols * entry + m_rows * rhs + n_cols * (1 + box)


def kernelize_feasibility(ilp: FeasIlp):
    """Pre-pack around an LP vertex; returns ProximityKernel or InfeasibleVerdict.

    Expects the standard form x >= 0 with no upper bounds (InputError
    otherwise -- the packing argument needs upward-unbounded coordinates).
    An infeasible linear relaxation settles the instance outright.
    """
    n, m = ilp.a.ncols, ilp.a.nrows
    if any(lo != 0 for lo in ilp.lower):
        raise InputError("kernelization expects zero lower bounds")
    if ilp.upper is not None and any(up is not None for up in ilp.upper):
        raise InputError("kernelization expects no upper bounds")
    lp = solve_vertex(StandardLp(a=ilp.a, b=ilp.b, upper=(None,) * n, objective=None))
    if not isinstance(lp, LpVertex):
        return InfeasibleVerdict("linear relaxation infeasible; so is the instance")
    delta = ilp.a.inf_norm()
    radius = proximity_radius(m, delta)
    fixed = tuple(max(0, ceil_frac(x) - radius) for x in lp.values)
    new_b = tuple(ilp.b[i] - dot(ilp.a.row(i), fixed) for i in range(m))
    # b' = a (x* - fixed) with 0 <= x*_j - fixed_j <= radius componentwise,
    # so the residual rhs is small regardless of signs in the matrix.
    cap = n * delta * radius
    if any(abs(v) > cap for v in new_b):
        raise VerificationError("residual right-hand side exceeded its proven cap")
    residual = FeasIlp(
        a=ilp.a, b=new_b, lower=(0,) * n, upper=(2 * radius,) * n
    )
    return ProximityKernel(
        fixed=fixed, residual=residual, proximity=radius, lp_vertex=lp
    )


# ---------------------------------------------------------------------------
# block-structured systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoStageIlp:
    """Blocks  a_i y + b_i x_i = rhs_i  sharing the first-stage variables y.

    Every a_i is s x r, every b_i is s x t, every rhs_i has length s.
    """

    a_blocks: tuple[IntMatrix, ...]
    b_blocks: tuple[IntMatrix, ...]
    rhs: tuple[IntVector, ...]

    def __post_init__(self) -> None:
        n = len(self.a_blocks)
        if n == 0 or len(self.b_blocks) != n or len(self.rhs) != n:
            raise InputError("need matching, nonempty block lists")
        s, r, t = self.a_blocks[0].nrows, self.a_blocks[0].ncols, self.b_blocks[0].ncols
        for a_i, b_i, rhs_i in zip(self.a_blocks, self.b_blocks, self.rhs):
            if (a_i.nrows, a_i.ncols) != (s, r) or (b_i.nrows, b_i.ncols) != (s, t):
                raise InputError("block dimensions must be uniform")
            if len(rhs_i) != s:
                raise InputError("rhs length must match block row count")

    @property
    def n_blocks(self) -> int:
        return len(self.a_blocks)

    def block_ilp(self, i: int) -> FeasIlp:
        a_i, b_i = self.a_blocks[i], self.b_blocks[i]
        rows = [a_i.row(k) + b_i.row(k) for k in range(a_i.nrows)]
        return FeasIlp(a=IntMatrix.from_rows(rows), b=self.rhs[i])

    def assemble(self) -> FeasIlp:
        """Full system over (y, x_1, ..., x_n) with zero off-block columns."""
        n, s = self.n_blocks, self.a_blocks[0].nrows
        r, t = self.a_blocks[0].ncols, self.b_blocks[0].ncols
        rows: list[tuple[int, ...]] = []
        b: list[int] = []
        for i in range(n):
            for k in range(s):
                row = list(self.a_blocks[i].row(k)) + [0] * (n * t)
                row[r + i * t : r + (i + 1) * t] = self.b_blocks[i].row(k)
                rows.append(tuple(row))
            b.extend(self.rhs[i])
        return FeasIlp(a=IntMatrix.from_rows(rows), b=tuple(b))


@dataclass(frozen=True)
class NFoldIlp:
    """Linking rows  sum_i a_i x_i = rhs_link  over diagonal blocks b_i x_i = rhs_i.

    Every a_i is r x t, every b_i is s x t; rhs_link has length r and every
    rhs_i has length s.
    """

    a_blocks: tuple[IntMatrix, ...]
    b_blocks: tuple[IntMatrix, ...]
    rhs_link: IntVector
    rhs: tuple[IntVector, ...]

    def __post_init__(self) -> None:
        n = len(self.a_blocks)
        if n == 0 or len(self.b_blocks) != n or len(self.rhs) != n:
            raise InputError("need matching, nonempty block lists")
        r, t, s = self.a_blocks[0].nrows, self.a_blocks[0].ncols, self.b_blocks[0].nrows
        for a_i, b_i, rhs_i in zip(self.a_blocks, self.b_blocks, self.rhs):
            if (a_i.nrows, a_i.ncols) != (r, t) or (b_i.nrows, b_i.ncols) != (s, t):
                raise InputError("block dimensions must be uniform")
            if len(rhs_i) != s:
                raise InputError("rhs length must match block row count")
        if len(self.rhs_link) != r:
            raise InputError("linking rhs length must match linking row count")

    @property
    def n_blocks(self) -> int:
        return len(self.a_blocks)

    def linking_ilp(self) -> FeasIlp:
        r = self.a_blocks[0].nrows
        rows = [
            tuple(v for a_i in self.a_blocks for v in a_i.row(k)) for k in range(r)
        ]
        return FeasIlp(a=IntMatrix.from_rows(rows), b=self.rhs_link)

    def block_ilp(self, i: int) -> FeasIlp:
        return FeasIlp(a=self.b_blocks[i], b=self.rhs[i])

    def assemble(self) -> FeasIlp:
        n, t = self.n_blocks, self.a_blocks[0].ncols
        r, s = self.a_blocks[0].nrows, self.b_blocks[0].nrows
        rows = [
            tuple(v for a_i in self.a_blocks for v in a_i.row(k)) for k in range(r)
        ]
        b = list(self.rhs_link)
        for i in range(n):
            for k in range(s):
                row = [0] * (n * t)
                row[i * t : (i + 1) * t] = self.b_blocks[i].row(k)
                rows.append(tuple(row))
            b.extend(self.rhs[i])
        return FeasIlp(a=IntMatrix.from_rows(rows), b=tuple(b))


def equiv_two_stage(
    ts: TwoStageIlp, u: int, budget: Optional[int] = None
) -> tuple[StaticEquivIlp, ...]:
    """Statically reduce each row block (a_i | b_i | rhs_i) independently.

    A joint (y, x_1..x_n) in the u-box solves the assembled system exactly
    when each (y, x_i) solves block i, and each block keeps its solutions
    under its own static reduction.
    """
    return tuple(
        static_equiv_ilp(ts.block_ilp(i), u=u, budget=budget)
        for i in range(ts.n_blocks)
    )


def two_stage_reduced(ts: TwoStageIlp, parts: tuple[StaticEquivIlp, ...]) -> TwoStageIlp:
    """Reassemble the reduced blocks into the two-stage shape."""
    r = ts.a_blocks[0].ncols
    a_blocks = []
    b_blocks = []
    rhs = []
    for part in parts:
        red = part.reduced
        a_blocks.append(
            IntMatrix.from_rows([red.a.row(k)[:r] for k in range(red.a.nrows)])
        )
        b_blocks.append(
            IntMatrix.from_rows([red.a.row(k)[r:] for k in range(red.a.nrows)])
        )
        rhs.append(red.b)
    return TwoStageIlp(
        a_blocks=tuple(a_blocks), b_blocks=tuple(b_blocks), rhs=tuple(rhs)
    )


def equiv_nfold(
    nf: NFoldIlp, u: int, budget: Optional[int] = None
) -> tuple[StaticEquivIlp, ...]:
    """Statically reduce the linking rows, then each diagonal block.

    Returns (linking part, block 1 part, ..., block n part). The linking
    reduction runs over all n*t variables at once; the block reductions only
    over their own t columns.
    """
    parts = [static_equiv_ilp(nf.linking_ilp(), u=u, budget=budget)]
    parts.extend(
        static_equiv_ilp(nf.block_ilp(i), u=u, budget=budget)
        for i in range(nf.n_blocks)
    )
    return tuple(parts)


def nfold_reduced(nf: NFoldIlp, parts: tuple[StaticEquivIlp, ...]) -> NFoldIlp:
    """Reassemble reduced linking rows and blocks into the n-fold shape."""
    n, t = nf.n_blocks, nf.a_blocks[0].ncols
    link = parts[0].reduced
    a_blocks = tuple(
        IntMatrix.from_rows(
            [link.a.row(k)[i * t : (i + 1) * t] for k in range(link.a.nrows)]
        )
        for i in range(n)
    )
    return NFoldIlp(
        a_blocks=a_blocks,
        b_blocks=tuple(part.reduced.a for part in parts[1:]),
        rhs_link=link.b,
        rhs=tuple(part.reduced.b for part in parts[1:]),
    )
