import itertools
import random

import pytest

from instakernel.budget import BudgetError, InputError, VerificationError
from instakernel.exactmath import dot
from instakernel.ilpcore import InfeasibleVerdict
from instakernel.schedbal import (
    EquivBundle,
    LoadBalancingInstance,
    Objective,
    balance_preprocess,
    brute_force_loadbalance,
    enumerate_configurations,
    equiv_loadbalancing,
    expand_schedule,
    graver_norm_bound,
    prefix_threshold,
    reconstruct_schedule,
)


def check_schedule(inst, schedule):
    assert len(schedule) == inst.m
    totals = [0] * inst.d
    for counts in schedule:
        load = dot(counts, inst.p)
        assert inst.l <= load <= inst.u
        for j in range(inst.d):
            totals[j] += counts[j]
    assert tuple(totals) == inst.n


def test_instance_validation():
    with pytest.raises(InputError):
        LoadBalancingInstance(p=(0,), n=(1,), m=1, l=0, u=1)
    with pytest.raises(InputError):
        LoadBalancingInstance(p=(1,), n=(-1,), m=1, l=0, u=1)
    with pytest.raises(InputError):
        LoadBalancingInstance(p=(1,), n=(1,), m=0, l=0, u=1)
    with pytest.raises(InputError):
        LoadBalancingInstance(p=(1,), n=(1,), m=1, l=2, u=1)
    with pytest.raises(InputError):
        LoadBalancingInstance(p=(1, 2), n=(1,), m=1, l=0, u=1)


def test_graver_norm_bound_pins():
    assert graver_norm_bound(Objective.CMAX, 3) == 7
    assert graver_norm_bound(Objective.CMIN, 5) == 11
    assert graver_norm_bound(Objective.LOAD_BALANCING, 1) == 25
    assert graver_norm_bound(Objective.CENVY, 2) == 81
    with pytest.raises(InputError):
        graver_norm_bound(Objective.CMAX, 0)


def test_enumerate_configurations_pin():
    confs = enumerate_configurations((2,), low=2, high=6, cap=5)
    assert confs == ((1,), (2,), (3,))
    confs2 = enumerate_configurations((2, 3), low=0, high=6, cap=2)
    expect = tuple(
        sorted(
            c
            for c in itertools.product(range(3), repeat=2)
            if 0 <= 2 * c[0] + 3 * c[1] <= 6
        )
    )
    assert confs2 == expect
    assert enumerate_configurations((2,), low=5, high=4, cap=3) == ()


def test_enumerate_configurations_budget():
    with pytest.raises(BudgetError):
        enumerate_configurations((1, 1, 1), low=0, high=30, cap=10, budget=5)


def test_balance_preprocess_conserves_feasibility():
    inst = LoadBalancingInstance(p=(2,), n=(6,), m=3, l=2, u=6)
    reduced, q = balance_preprocess(inst, Objective.LOAD_BALANCING)
    assert reduced.m == inst.m
    assert reduced.n == tuple(inst.n[j] - inst.m * q[j] for j in range(inst.d))
    # any residual schedule plus q per machine lands in the original window
    assert reduced.l + dot(q, inst.p) >= inst.l or reduced.l == 0
    assert reduced.u + dot(q, inst.p) <= inst.u


def test_balance_preprocess_infeasible():
    # the peel only exceeds the ceiling once n/m clears the 2*d*g hold-back
    inst = LoadBalancingInstance(p=(3,), n=(1000,), m=1, l=0, u=4)
    verdict = balance_preprocess(inst, Objective.LOAD_BALANCING)
    assert isinstance(verdict, InfeasibleVerdict)
    assert "exceeds the ceiling" in verdict.reason
    assert isinstance(brute_force_loadbalance(inst), InfeasibleVerdict)


def test_prefix_threshold_pin():
    assert prefix_threshold(1, 1) == 321602


def test_equiv_bundle_pinned_example():
    inst = LoadBalancingInstance(p=(2,), n=(6,), m=3, l=2, u=6)
    bundle = equiv_loadbalancing(inst)
    assert isinstance(bundle, EquivBundle)
    assert bundle.report.vertex_support <= inst.d + 1
    assert bundle.report.residual_bits <= bundle.report.bits_bound
    assert bundle.residual.m >= 1
    witness = brute_force_loadbalance(bundle.residual)
    assert not isinstance(witness, InfeasibleVerdict)
    full = reconstruct_schedule(bundle, witness)
    check_schedule(inst, full)


def test_equiv_matches_brute_force_small_grid():
    checked = feasible_count = 0
    for n0 in range(0, 9):
        for m in (1, 2, 3):
            for low, high in ((0, 3), (2, 5), (4, 4)):
                inst = LoadBalancingInstance(p=(2,), n=(n0,), m=m, l=low, u=high)
                bundle = equiv_loadbalancing(inst)
                truth = brute_force_loadbalance(inst)
                checked += 1
                if isinstance(truth, InfeasibleVerdict):
                    if not isinstance(bundle, InfeasibleVerdict):
                        resid = brute_force_loadbalance(bundle.residual)
                        assert isinstance(resid, InfeasibleVerdict)
                    continue
                feasible_count += 1
                check_schedule(inst, truth)
                assert isinstance(bundle, EquivBundle)
                resid = brute_force_loadbalance(bundle.residual)
                assert not isinstance(resid, InfeasibleVerdict)
                check_schedule(inst, reconstruct_schedule(bundle, resid))
    assert checked == 81 and feasible_count >= 20


def test_single_type_closed_form_agreement():
    # with one job type, feasibility has a closed form: per-machine counts
    # k must satisfy ceil(l/p) <= k <= floor(u/p) and the counts sum to n
    for pt in (1, 2, 3):
        for n0 in range(0, 13):
            for m in (1, 2, 4):
                for low, high in ((0, 2 * pt), (pt, 3 * pt), (0, 0)):
                    inst = LoadBalancingInstance(
                        p=(pt,), n=(n0,), m=m, l=low, u=high
                    )
                    klo = -(-low // pt)
                    khi = high // pt
                    expect = klo <= khi and m * klo <= n0 <= m * khi
                    got = brute_force_loadbalance(inst)
                    assert expect == (not isinstance(got, InfeasibleVerdict))


def test_cmax_objective_requires_zero_floor():
    inst = LoadBalancingInstance(p=(1,), n=(4,), m=2, l=1, u=3)
    with pytest.raises(InputError):
        equiv_loadbalancing(inst, objective=Objective.CMAX)


def test_cmin_objective_materializes_ceiling():
    inst = LoadBalancingInstance(p=(2,), n=(5,), m=2, l=3, u=3)
    bundle = equiv_loadbalancing(inst, objective=Objective.CMIN)
    # ceiling becomes total work, so (4, 6) style splits are allowed
    assert isinstance(bundle, EquivBundle)
    resid = brute_force_loadbalance(bundle.residual)
    assert not isinstance(resid, InfeasibleVerdict)
    full = reconstruct_schedule(bundle, resid)
    assert len(full) == inst.m
    assert all(dot(c, inst.p) >= inst.l for c in full)
    assert sum(c[0] for c in full) == inst.n[0]


def test_prefixing_kicks_in_at_huge_machine_counts():
    m = 400_000
    inst = LoadBalancingInstance(p=(1,), n=(m,), m=m, l=1, u=1)
    bundle = equiv_loadbalancing(inst)
    assert isinstance(bundle, EquivBundle)
    assert bundle.report.machines_prefixed > 0
    k = prefix_threshold(1, 1)
    assert bundle.residual.m <= 2 * (k + 1)
    assert bundle.pre.machines_fixed() + bundle.residual.m == m
    # the only configuration is a single unit job; count-vector form expands
    assert bundle.configs == ((1,),)
    full = reconstruct_schedule(bundle, (bundle.residual.m,))
    check_schedule(inst, full)


def test_expand_schedule_names_offending_machine():
    inst = LoadBalancingInstance(p=(2,), n=(4,), m=2, l=2, u=4)
    bundle = equiv_loadbalancing(inst)
    bad = ((1,),) * (bundle.residual.m - 1) + ((9,),)
    with pytest.raises(VerificationError) as err:
        expand_schedule(inst, bundle.residual, bundle.pre, bad)
    assert f"machine {bundle.residual.m - 1}" in str(err.value)
    with pytest.raises(VerificationError):
        expand_schedule(inst, bundle.residual, bundle.pre, ((1,),) * 7)


def test_reconstruct_rejects_malformed_solutions():
    inst = LoadBalancingInstance(p=(2,), n=(4,), m=2, l=2, u=4)
    bundle = equiv_loadbalancing(inst)
    with pytest.raises(InputError):
        reconstruct_schedule(bundle, (1, "x"))
    with pytest.raises(InputError):
        reconstruct_schedule(bundle, (1,) * (len(bundle.configs) + 1))


def test_brute_force_random_two_types():
    rng = random.Random(99)
    for _ in range(40):
        inst = LoadBalancingInstance(
            p=(1, rng.randint(2, 3)),
            n=(rng.randint(0, 5), rng.randint(0, 5)),
            m=rng.randint(1, 3),
            l=rng.randint(0, 2),
            u=rng.randint(2, 8),
        )
        got = brute_force_loadbalance(inst)
        exhaustive = _exhaustive_feasible(inst)
        if isinstance(got, InfeasibleVerdict):
            assert not exhaustive
        else:
            check_schedule(inst, got)
            assert exhaustive


def _exhaustive_feasible(inst):
    per_machine = [
        c
        for c in itertools.product(
            range(inst.n[0] + 1), *(range(inst.n[j] + 1) for j in range(1, inst.d))
        )
        if inst.l <= dot(c, inst.p) <= inst.u
    ]
    for combo in itertools.product(per_machine, repeat=inst.m):
        totals = tuple(sum(c[j] for c in combo) for j in range(inst.d))
        if totals == inst.n:
            return True
    return False
