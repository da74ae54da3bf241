import itertools

import numpy as np
import pytest

from postprice.cost_model import CostModel
from postprice.instances import ArrivalInstance, single_slot_instance
from postprice.mechanism import Customer, make_catalog, run
from postprice.oracle import (BudgetExceeded, brute_force_opt, dual_upper_bound, empirical_ratio,
                              enumeration_size)
from postprice.pricing import ResourceSetup, synthesize_optimal

SQ = CostModel(1.0, 2.0)


def two_customer():
    cat = make_catalog([(0.4,)])
    custs = [Customer(0, 0, 1, {1: 0.5}), Customer(1, 0, 1, {1: 0.3})]
    return ArrivalInstance(custs, cat, 1)


def naive_opt(inst, costs):
    """Enumerate the full product of choices (no search order, no pruning)."""
    units = np.array([b.units for b in inst.catalog])
    best = 0.0
    options = [[None] + [b for b in c.valuations if b != 0] for c in inst.customers]
    for combo in itertools.product(*options):
        y = np.zeros((len(costs), inst.horizon))
        val = 0.0
        for c, b in zip(inst.customers, combo):
            if b is None:
                continue
            y[:, c.arrival:c.arrival + c.duration] += units[b][:, None]
            val += c.valuations[b]
        if np.all(y <= 1 + 1e-12):
            best = max(best, val - sum(np.sum(f.cost(np.minimum(y[k], 1))) for k, f in enumerate(costs)))
    return best


def test_brute_force_examples():
    assert brute_force_opt(ArrivalInstance([], make_catalog([(0.1,)]), 1), [SQ]) == 0.0
    inst = two_customer()
    w, assign = brute_force_opt(inst, [SQ], return_assignment=True)
    assert w == pytest.approx(0.34)
    assert assign == [1, None]
    cheap = ArrivalInstance([Customer(0, 0, 1, {1: 0.01})], make_catalog([(0.4,)]), 1)
    assert brute_force_opt(cheap, [SQ]) == 0.0


def test_brute_force_capacity():
    cat = make_catalog([(0.6,)])
    inst = ArrivalInstance([Customer(0, 0, 1, {1: 5.0}), Customer(1, 0, 1, {1: 5.0})], cat, 1)
    assert brute_force_opt(inst, [SQ]) == pytest.approx(5.0 - 0.36)


def test_budget():
    cat = make_catalog([(0.001,)] * 3)
    inst = ArrivalInstance([Customer(i, 0, 1, {1: 0.1}) for i in range(21)], cat, 1)
    assert enumeration_size(inst) == pytest.approx(42.0)
    with pytest.raises(BudgetExceeded):
        brute_force_opt(inst, [SQ])


def test_dual_examples():
    empty = ArrivalInstance([], make_catalog([(0.1,)]), 3)
    assert dual_upper_bound(empty, [SQ], np.zeros((1, 3))) == 0.0
    D = dual_upper_bound(two_customer(), [SQ], np.array([[0.8]]))
    assert D == pytest.approx(0.18 + 0.16)
    with pytest.raises(ValueError):
        dual_upper_bound(two_customer(), [SQ], np.array([[-0.1]]))
    with pytest.raises(ValueError):
        dual_upper_bound(two_customer(), [SQ], np.zeros((1, 2)))


def test_pruning_matches_exhaustive_on_50_instances():
    costs = [CostModel(0.223, 3.0), CostModel(1.0, 1.5)]
    cat = make_catalog([(a, b) for a in (0.1, 0.3) for b in (0.2, 0.4)])
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 8))
        inst = single_slot_instance(rng, n, cat, [3 * c.c_high for c in costs],
                                    multi_bundle=bool(seed % 2))
        a = brute_force_opt(inst, costs, prune=True)
        b = brute_force_opt(inst, costs, prune=False)
        assert a == pytest.approx(b, abs=1e-12)
        if seed < 15:
            assert a == pytest.approx(naive_opt(inst, costs), abs=1e-12)


def test_multislot_opt_against_naive():
    rng = np.random.default_rng(11)
    cat = make_catalog([(0.3,), (0.5,)])
    for _ in range(10):
        custs = []
        for i in range(6):
            a = int(rng.integers(0, 3))
            d = int(rng.integers(1, 4 - a))
            custs.append(Customer(i, a, d, {1: float(rng.uniform(0, 2) * d * 0.3),
                                           2: float(rng.uniform(0, 2) * d * 0.5)}))
        custs.sort(key=lambda c: c.arrival)
        inst = ArrivalInstance(custs, cat, 3)
        assert brute_force_opt(inst, [SQ]) == pytest.approx(naive_opt(inst, [SQ]), abs=1e-12)


def test_weak_duality_and_ratio_ordering():
    rng = np.random.default_rng(0)
    cat = make_catalog([(0.05,), (0.1,)])
    for seed in range(30):
        rng = np.random.default_rng(seed)
        inst = single_slot_instance(rng, 8, cat, [2.0], multi_bundle=True)
        pf = synthesize_optimal(ResourceSetup(SQ, 2.0))
        lg = run(inst, [pf], [SQ])
        opt = brute_force_opt(inst, [SQ])
        D = dual_upper_bound(inst, [SQ], lg.terminal_prices)
        assert lg.w_online <= opt + 1e-9 <= D + 2e-9
        # any other nonnegative table is also a bound
        assert dual_upper_bound(inst, [SQ], rng.uniform(0, 3, (1, 1))) >= opt - 1e-9
        rep = empirical_ratio(lg.w_online, D, opt)
        if lg.w_online > 0:
            assert 1 - 1e-9 <= rep.er_exact <= rep.er_bound + 1e-12


def test_empirical_ratio_cases():
    r = empirical_ratio(2.0, 3.0, 2.0)
    assert r.er_exact == 1.0 and r.er_bound == 1.5 and r.method == "exact" and r.er == 1.0
    z = empirical_ratio(0.0, 0.0, 0.0)
    assert z.er_exact is None and z.er_bound is None and z.both_zero
    d = empirical_ratio(2.0, 3.0)
    assert d.method == "dual_bound" and d.er == 1.5 and d.w_opt == 3.0
