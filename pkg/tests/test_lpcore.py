import random
from fractions import Fraction

import pytest

from instakernel.budget import InputError
from instakernel.exactmath import IntMatrix
from instakernel.lpcore import INFEASIBLE, UNBOUNDED, LpVertex, StandardLp, solve_vertex


def _check_feasible(lp: StandardLp, vert: LpVertex) -> None:
    assert lp.a.nrows == len(lp.b)
    for i in range(lp.a.nrows):
        lhs = sum(Fraction(lp.a.entry(i, j)) * vert.values[j] for j in range(lp.a.ncols))
        assert lhs == lp.b[i], f"row {i} violated"
    for j, v in enumerate(vert.values):
        assert v >= 0
        if lp.upper is not None and lp.upper[j] is not None:
            assert v <= lp.upper[j]


def test_any_vertex_on_simple_line():
    lp = StandardLp(a=IntMatrix.from_rows([[1, 1]]), b=(5,))
    vert = solve_vertex(lp)
    assert isinstance(vert, LpVertex)
    _check_feasible(lp, vert)
    # a vertex of a 1-row system has at most one nonzero
    assert sum(1 for v in vert.values if v != 0) <= 1


def test_minimization_pin():
    # min x2 on x1 + x2 = 5, x <= (3, 5): optimum x = (3, 2)
    lp = StandardLp(
        a=IntMatrix.from_rows([[1, 1]]),
        b=(5,),
        upper=(3, 5),
        objective=(0, 1),
    )
    vert = solve_vertex(lp)
    assert isinstance(vert, LpVertex)
    assert vert.values == (Fraction(3), Fraction(2))
    assert vert.objective_value == 2


def test_fractional_vertex():
    # 2x1 + x2 = 3, x1 <= 1 with objective -x1: x = (1, 1); free vertex x=(3/2, 0)
    lp = StandardLp(a=IntMatrix.from_rows([[2, 1]]), b=(3,), objective=(1, 0))
    vert = solve_vertex(lp)
    assert isinstance(vert, LpVertex)
    _check_feasible(lp, vert)
    assert vert.objective_value == 0  # x1 = 0, x2 = 3
    lp2 = StandardLp(a=IntMatrix.from_rows([[2, 1]]), b=(3,), objective=(-1, 0))
    vert2 = solve_vertex(lp2)
    assert vert2.values == (Fraction(3, 2), Fraction(0))


def test_infeasible_and_unbounded():
    assert solve_vertex(StandardLp(a=IntMatrix.from_rows([[1, 1]]), b=(-1,))) is INFEASIBLE
    assert (
        solve_vertex(
            StandardLp(a=IntMatrix.from_rows([[1, -1]]), b=(0,), objective=(-1, 0))
        )
        is UNBOUNDED
    )
    # with a box the same objective is bounded
    capped = solve_vertex(
        StandardLp(
            a=IntMatrix.from_rows([[1, -1]]), b=(0,), upper=(4, 4), objective=(-1, 0)
        )
    )
    assert isinstance(capped, LpVertex)
    assert capped.objective_value == -4


def test_negative_rhs_rows_are_normalized():
    lp = StandardLp(a=IntMatrix.from_rows([[-1, -1]]), b=(-5,), objective=(1, 1))
    vert = solve_vertex(lp)
    assert isinstance(vert, LpVertex)
    assert vert.objective_value == 5


def test_upper_bound_validation():
    with pytest.raises(InputError):
        StandardLp(a=IntMatrix.from_rows([[1]]), b=(1,), upper=(-1,))
    with pytest.raises(InputError):
        StandardLp(a=IntMatrix.from_rows([[1]]), b=(1, 2))


def test_random_systems_feasibility_exactness():
    """Planted-feasible systems must come back feasible with exact rows."""
    rng = random.Random(4242)
    for _ in range(150):
        m = rng.randint(1, 3)
        n = rng.randint(1, 4)
        a = IntMatrix.from_rows(
            [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        )
        x0 = tuple(rng.randint(0, 4) for _ in range(n))
        b = a.mat_vec(x0)
        upper = tuple(rng.choice([None, 6]) for _ in range(n))
        if any(u is not None and x > u for x, u in zip(x0, upper)):
            upper = (6,) * n if all(x <= 6 for x in x0) else None
        objective = tuple(rng.randint(-2, 2) for _ in range(n))
        lp = StandardLp(a=a, b=b, upper=upper, objective=objective)
        vert = solve_vertex(lp)
        # planted point: never infeasible; open boxes may make the
        # objective unbounded, which still certifies feasibility
        assert vert is not INFEASIBLE, (a, b)
        if isinstance(vert, LpVertex):
            _check_feasible(lp, vert)
            assert vert.objective_value is not None


def test_objective_never_worse_than_planted_point():
    rng = random.Random(99)
    for _ in range(150):
        m = rng.randint(1, 2)
        n = rng.randint(1, 4)
        a = IntMatrix.from_rows(
            [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        )
        x0 = tuple(rng.randint(0, 4) for _ in range(n))
        b = a.mat_vec(x0)
        objective = tuple(rng.randint(-2, 2) for _ in range(n))
        lp = StandardLp(a=a, b=b, upper=(5,) * n, objective=objective)
        if any(x > 5 for x in x0):
            continue
        vert = solve_vertex(lp)
        assert isinstance(vert, LpVertex)
        _check_feasible(lp, vert)
        planted_value = sum(objective[j] * x0[j] for j in range(n))
        assert vert.objective_value <= planted_value


def test_determinism():
    lp = StandardLp(
        a=IntMatrix.from_rows([[1, 2, 1], [0, 1, 1]]),
        b=(4, 2),
        upper=(3, 3, 3),
        objective=(1, 1, 1),
    )
    first = solve_vertex(lp)
    for _ in range(5):
        again = solve_vertex(lp)
        assert again == first
