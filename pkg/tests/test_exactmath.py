import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from instakernel.exactmath import (
    IntMatrix,
    SingularMatrixError,
    bit_size,
    cramer_solve,
    det,
    det_cofactor,
    dot,
    hadamard_l1_bound,
    isqrt_ceil,
    l1_norm,
    primitive_direction,
    vec_gcd,
)


def rand_matrix(rng, n, lo=-5, hi=5):
    return IntMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
    )


def test_det_pins():
    assert det(IntMatrix.from_rows([[3]])) == 3
    assert det(IntMatrix.from_rows([[1, 2], [3, 4]])) == -2
    assert det(IntMatrix.identity(4)) == 1
    assert det(IntMatrix.from_rows([[2, 0], [0, 3]])) == 6


def test_det_matches_cofactor_many():
    rng = random.Random(2024)
    for _ in range(300):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n)
        assert det(m) == det_cofactor(m)


def test_det_huge_entries_stay_exact():
    big = 10**30
    m = IntMatrix.from_rows([[big, 1], [1, big]])
    assert det(m) == big * big - 1


def test_cramer_residual_identity():
    rng = random.Random(7)
    solved = 0
    while solved < 100:
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n)
        rhs = tuple(rng.randint(-6, 6) for _ in range(n))
        try:
            rat, scaled, scale = cramer_solve(m, rhs)
        except SingularMatrixError:
            continue
        solved += 1
        for i in range(n):
            residual = sum(Fraction(m.entry(i, j)) * rat[j] for j in range(n))
            assert residual == rhs[i]
        assert scale == abs(det(m))
        assert all(scale * rat[j] == scaled[j] for j in range(n))


def test_cramer_rejects_singular():
    with pytest.raises(SingularMatrixError):
        cramer_solve(IntMatrix.from_rows([[1, 2], [2, 4]]), (1, 1))


def test_hadamard_bound_dominates_scaled_solutions():
    # the l1 norm of any |det|-scaled basic solution B^{-1} e_j * |det B|
    # must fit under the closed-form cap
    rng = random.Random(11)
    checked = 0
    while checked < 200:
        n = rng.randint(1, 4)
        a = rng.randint(1, 4)
        m = rand_matrix(rng, n, -a, a)
        try:
            _, scaled, _ = cramer_solve(m, tuple(int(i == 0) for i in range(n)))
        except SingularMatrixError:
            continue
        checked += 1
        assert l1_norm(scaled) <= hadamard_l1_bound(n, a)


def test_hadamard_pins():
    assert hadamard_l1_bound(1, 7) == 1
    # 2 * (sqrt(2)*3)^1 = 8.48... -> 9
    assert hadamard_l1_bound(2, 3) == 9


@given(st.integers(min_value=0, max_value=10**12))
def test_isqrt_ceil_property(n):
    s = isqrt_ceil(n)
    assert s * s >= n
    assert s == 0 or (s - 1) * (s - 1) < n


def test_bit_size_accounting():
    assert bit_size(0) == 1
    assert bit_size(1) == 2
    assert bit_size(-1) == 2
    assert bit_size(255) == 9
    assert bit_size((3, (4, 5))) == bit_size(3) + bit_size(4) + bit_size(5)
    m = IntMatrix.from_rows([[1, 0], [0, 1]])
    assert bit_size(m) == 2 + 2 + 1 + 1
    with pytest.raises(TypeError):
        bit_size(True)


def test_matrix_ops():
    m = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert m.row(1) == (4, 5, 6)
    assert m.col(2) == (3, 6)
    assert m.transpose().row(0) == (1, 4)
    assert m.inf_norm() == 6
    assert m.mat_vec((1, 1, 1)) == (6, 15)
    assert m.replace_col(0, (9, 9)).col(0) == (9, 9)


def test_vector_helpers():
    assert dot((1, 2), (3, 4)) == 11
    assert l1_norm((-3, 4)) == 7
    assert vec_gcd((4, 6, 0)) == 2
    assert primitive_direction((4, -6)) == (2, -3)
    assert primitive_direction((0, 0)) == (0, 0)
