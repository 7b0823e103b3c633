import random

import pytest

from instakernel.budget import BudgetError, InputError
from instakernel.exactmath import IntMatrix, dot, l1_norm
from instakernel.ilpcore import enumerate_feasible
from instakernel.knapfam import (
    KnapsackInstance,
    MdKnapsackInstance,
    SubsetSumInstance,
    ThresholdSeparator,
    UnboundedKnapsackInstance,
    compress_knapsack,
    compress_mdknapsack,
    compress_subsetsum,
    dp_knapsack_oracle,
    dp_uks_oracle,
    equiv_uks,
    feasible_subsets,
    feasible_subsets_md,
    knapsack_to_ilp,
    subsetsum_solutions,
    subsetsum_to_ilp,
    uks_to_knapsack,
)


def rand_knapsack(rng, n_max=5, w_max=12):
    n = rng.randint(1, n_max)
    weights = tuple(rng.randint(1, w_max) for _ in range(n))
    profits = tuple(rng.randint(0, w_max) for _ in range(n))
    return KnapsackInstance(
        weights=weights,
        profits=profits,
        capacity=rng.randint(0, sum(weights)),
        target=rng.randint(0, sum(profits) + 1),
    )


def test_instance_validation():
    with pytest.raises(InputError):
        KnapsackInstance(weights=(), profits=(), capacity=1, target=0)
    with pytest.raises(InputError):
        KnapsackInstance(weights=(0,), profits=(1,), capacity=1, target=0)
    with pytest.raises(InputError):
        KnapsackInstance(weights=(1,), profits=(-1,), capacity=1, target=0)
    with pytest.raises(InputError):
        SubsetSumInstance(values=(1, -2), target=3)
    with pytest.raises(InputError):
        MdKnapsackInstance(
            weight_matrix=IntMatrix.from_rows([[1, 2]]),
            profits=(1,),
            capacities=(3,),
            target=0,
        )


def test_knapsack_to_ilp_pin():
    inst = KnapsackInstance(weights=(2, 3), profits=(4, 5), capacity=4, target=5)
    ilp = knapsack_to_ilp(inst)
    assert ilp.a.row(0) == (2, 3, 1, 0)
    assert ilp.a.row(1) == (4, 5, 0, -1)
    assert ilp.b == (4, 5)
    assert ilp.upper == (1, 1, 4, 4)
    # the x-parts of its solutions are exactly the feasible subsets
    xs = sorted(set(sol[:2] for sol in enumerate_feasible(ilp)))
    assert tuple(xs) == feasible_subsets(inst)


def test_trivially_infeasible_matches_ilp():
    inst = KnapsackInstance(weights=(2,), profits=(3,), capacity=2, target=4)
    assert inst.trivially_infeasible
    assert enumerate_feasible(knapsack_to_ilp(inst)) == ()
    assert feasible_subsets(inst) == ()


def test_dp_oracle_matches_subset_scan():
    rng = random.Random(77)
    for _ in range(150):
        inst = rand_knapsack(rng)
        top, ok = dp_knapsack_oracle(inst)
        packs = [
            dot(inst.profits, x)
            for x in _subsets(inst.n_items)
            if dot(inst.weights, x) <= inst.capacity
        ]
        assert top == max(packs)
        assert ok == (len(feasible_subsets(inst)) > 0)


def _subsets(n):
    return [tuple((mask >> i) & 1 for i in range(n)) for mask in range(1 << n)]


def test_dp_oracle_budget():
    inst = KnapsackInstance(weights=(1,), profits=(1,), capacity=10**9, target=0)
    with pytest.raises(BudgetError):
        dp_knapsack_oracle(inst)


def test_threshold_separator_complete_on_integer_candidates():
    rng = random.Random(31)
    agree = differ = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        base = tuple(rng.randint(0, 6) for _ in range(n))
        rhs = rng.randint(0, sum(base) + 1)
        sep = ThresholdSeparator(base + (rhs,))
        cand = tuple(rng.randint(0, 6) for _ in range(n)) + (rng.randint(0, 20),)

        def sgn(v):
            return (v > 0) - (v < 0)

        brute = [
            x
            for x in _subsets(n)
            if sgn(dot(base, x) - rhs) != sgn(dot(cand[:n], x) - cand[n])
        ]
        hit = sep.find(cand)
        if brute:
            differ += 1
            assert hit is not None
            x = hit[:n]
            assert hit[n] == -1
            assert sgn(dot(base, x) - rhs) != sgn(dot(cand[:n], x) - cand[n])
        else:
            agree += 1
            assert hit is None
    assert agree >= 10 and differ >= 10


def test_threshold_separator_validation_and_budget():
    with pytest.raises(InputError):
        ThresholdSeparator((1, -2, 3))
    sep = ThresholdSeparator((5, 5, 5), budget=4)
    with pytest.raises(BudgetError):
        sep.find((5, 5, 5))


def test_compress_knapsack_preserves_subsets():
    rng = random.Random(404)
    for _ in range(40):
        inst = rand_knapsack(rng)
        comp = compress_knapsack(inst)
        assert feasible_subsets(comp.reduced) == feasible_subsets(inst)
        assert l1_norm(comp.reduced.weights) <= l1_norm(inst.weights)
        assert l1_norm(comp.reduced.profits) <= l1_norm(inst.profits)
        before, after, bound = comp.equiv.bit_report
        assert after <= bound


def test_compress_knapsack_huge_coefficients():
    big = 1 << 40
    inst = KnapsackInstance(
        weights=(big + 1, big + 2, 2 * big + 1, big),
        profits=(big, big + 3, big - 1, 2 * big),
        capacity=3 * big + 2,
        target=2 * big,
    )
    comp = compress_knapsack(inst)
    assert feasible_subsets(comp.reduced) == feasible_subsets(inst)
    assert max(comp.reduced.weights) < 1 << 12


def test_compress_subsetsum_pin():
    inst = SubsetSumInstance(values=(3, 5, 7), target=8)
    assert subsetsum_solutions(inst) == ((1, 1, 0),)
    comp = compress_subsetsum(inst)
    assert subsetsum_solutions(comp.reduced) == ((1, 1, 0),)
    assert l1_norm(comp.reduced.values) + comp.reduced.target <= 8 + 7


def test_compress_subsetsum_random():
    rng = random.Random(55)
    for _ in range(60):
        n = rng.randint(1, 5)
        values = tuple(rng.randint(1, 30) for _ in range(n))
        inst = SubsetSumInstance(values=values, target=rng.randint(0, sum(values)))
        comp = compress_subsetsum(inst)
        assert subsetsum_solutions(comp.reduced) == subsetsum_solutions(inst)


def test_compress_mdknapsack_preserves():
    rng = random.Random(606)
    for _ in range(30):
        n = rng.randint(1, 5)
        wm = IntMatrix.from_rows(
            [[rng.randint(0, 9) for _ in range(n)] for _ in range(2)]
        )
        inst = MdKnapsackInstance(
            weight_matrix=wm,
            profits=tuple(rng.randint(0, 9) for _ in range(n)),
            capacities=(rng.randint(0, 20), rng.randint(0, 20)),
            target=rng.randint(0, 9 * n),
        )
        comp = compress_mdknapsack(inst)
        assert feasible_subsets_md(comp.reduced) == feasible_subsets_md(inst)


def test_uks_expansion_pin():
    inst = UnboundedKnapsackInstance(weights=(1,), profits=(3,), capacity=4, target=0)
    expanded, copies = uks_to_knapsack(inst)
    assert expanded.weights == (1, 2, 4)
    assert expanded.profits == (3, 6, 12)
    assert copies == ((0, 0), (0, 1), (0, 2))


def test_uks_expansion_placeholder():
    inst = UnboundedKnapsackInstance(weights=(9,), profits=(5,), capacity=4, target=0)
    expanded, copies = uks_to_knapsack(inst)
    assert expanded.weights == (5,)
    assert expanded.profits == (0,)
    assert copies == (None,)
    assert dp_knapsack_oracle(expanded)[0] == dp_uks_oracle(inst) == 0


def test_uks_expansion_value_identity():
    rng = random.Random(88)
    for _ in range(80):
        n = rng.randint(1, 4)
        inst = UnboundedKnapsackInstance(
            weights=tuple(rng.randint(1, 10) for _ in range(n)),
            profits=tuple(rng.randint(0, 10) for _ in range(n)),
            capacity=rng.randint(0, 40),
            target=0,
        )
        expanded, _ = uks_to_knapsack(inst)
        assert dp_knapsack_oracle(expanded)[0] == dp_uks_oracle(inst)


def test_uks_equiv_multiplicity_translation():
    inst = UnboundedKnapsackInstance(
        weights=(2, 5), profits=(3, 8), capacity=11, target=12
    )
    eq = equiv_uks(inst)
    for choice in _subsets(eq.expanded.n_items):
        if dot(eq.expanded.weights, choice) > inst.capacity:
            continue
        mult = eq.to_multiplicities(choice)
        assert dot(inst.weights, mult) == dot(eq.expanded.weights, choice)
        assert dot(inst.profits, mult) == dot(eq.expanded.profits, choice)
    with pytest.raises(InputError):
        eq.to_multiplicities((1,))


def test_subsetsum_to_ilp_identity():
    inst = SubsetSumInstance(values=(3, 5, 7), target=8)
    assert enumerate_feasible(subsetsum_to_ilp(inst)) == ((1, 1, 0),)
