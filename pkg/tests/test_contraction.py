import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import objcontract.contraction as contraction
from objcontract.contraction import (
    NON_CONTRACTABLE,
    OPTIMAL,
    SPLIT,
    TIMEOUT,
    ContractionConfig,
    InvalidCut,
    SignedInputError,
    contract_instance,
    contract_objective,
    contract_signed,
    initial_rows,
    preprocess,
    separate,
)
from objcontract.core import Instance, contraction_factor
from objcontract.enumeration import efficient_set, verify_ocpset_feasible, verify_order_preserving
from objcontract.ipkernel.master import CutRow
from reference import brute_force_min

small_c = st.lists(st.integers(1, 60), min_size=1, max_size=6)


def test_preprocess_examples():
    p = preprocess((7, 2, 2))
    assert p.core == (2, 2, 7)
    assert p.tie_classes == ((1, 2),)
    assert p.restore((1, 1, 3)) == (3, 1, 1)
    p = preprocess((5, 0, 3))
    assert p.core == (3, 5) and p.zero_index == {1}
    assert p.restore((1, 2)) == (2, 0, 1)
    p = preprocess((-3, 5))
    assert p.core == (3, 5) and p.signs == (-1, 1)


def test_initial_rows_examples():
    assert initial_rows((2, 3, 4, 9)) == [CutRow({1}, {0}), CutRow({2}, {1}), CutRow({3}, {2})]
    assert initial_rows((2, 2, 7)) == [CutRow({1}, {0}, strict=False), CutRow({2}, {1})]
    assert initial_rows((5,)) == []
    with pytest.raises(ValueError):
        initial_rows((3, 1))


def test_separate_examples():
    assert separate((1, 2, 4), (1, 2, 3)) == CutRow({2}, {0, 1})
    # oracle A finds delta 2 with kappa 0 here, so the row is an equality
    assert separate((2, 3, 4, 9), (1, 2, 3, 4)) == CutRow({3}, {0, 1, 2}, strict=False)
    assert separate((1, 3, 7, 20), (1, 2, 4, 8)) is None


def test_contract_examples():
    r = contract_objective((1, 3, 7, 20))
    assert (r.d, r.status, r.gamma) == ((1, 2, 4, 8), OPTIMAL, Fraction(16, 31))
    r = contract_objective((1, 3, 5, 7))
    assert (r.d, r.status, r.gamma) == ((1, 3, 5, 7), NON_CONTRACTABLE, 0)
    for c in [(1, 1), (1, 2)]:
        r = contract_objective(c)
        assert r.d == c and r.status == NON_CONTRACTABLE
    r = contract_objective((3, 6, 12))
    assert (r.d, r.gamma) == ((1, 2, 4), Fraction(2, 3))
    assert contract_objective((10, 20, 35)).d == (1, 2, 4)


def test_ties_zeros_and_order():
    assert contract_objective((7, 2, 2)).d == (3, 1, 1)
    assert contract_objective((5, 0, 3)).d == (2, 0, 1)
    r = contract_objective((0, 0))
    assert r.d == (0, 0) and r.status == NON_CONTRACTABLE
    with pytest.raises(ValueError):
        contract_objective(())


def test_signed_examples():
    assert contract_signed((-3, 5)).d == (-1, 2)
    r = contract_signed((-1, 2))
    assert r.d == (-1, 2) and r.status == NON_CONTRACTABLE
    assert contract_signed((-4, -2)).d == (-2, -1)
    assert contract_objective((-3, 5), ContractionConfig(signed_mode=SPLIT)).d == (-1, 2)
    with pytest.raises(SignedInputError):
        contract_objective((-3, 5))


def test_signed_matches_exhaustive_search():
    rng = random.Random(8)
    for _ in range(12):
        n = rng.randint(1, 3)
        c = [rng.choice([-1, 1]) * rng.randint(1, 7) for _ in range(n)]
        top = max(abs(v) for v in c)
        value, _ = brute_force_min(c, lo=-top, hi=top)
        r = contract_signed(c)
        assert sum(abs(v) for v in r.d) == value
        assert verify_order_preserving(c, r.d) == []


def test_timeout_returns_input():
    r = contract_objective((1, 3, 7, 20), ContractionConfig(time_limit=1e-9))
    assert (r.d, r.status, r.gamma) == ((1, 3, 7, 20), TIMEOUT, 0)
    r = contract_objective((1, 3, 7, 20), ContractionConfig(max_cuts=1))
    assert r.status == TIMEOUT and r.d == (1, 3, 7, 20)


def test_config_validation():
    with pytest.raises(ValueError):
        ContractionConfig(time_limit=0)
    with pytest.raises(ValueError):
        ContractionConfig(max_cuts=0)
    with pytest.raises(ValueError):
        ContractionConfig(signed_mode="maybe")


def test_trace_is_monotone():
    r = contract_objective((13, 27, 44, 91, 160, 333), ContractionConfig(emit_trace=True))
    assert r.trace and r.trace[-1][1] == r.trace[-1][2] == sum(r.d)
    uppers = [t[1] for t in r.trace]
    lowers = [t[2] for t in r.trace]
    assert uppers == sorted(uppers, reverse=True)
    assert lowers == sorted(lowers)
    assert [t[0] for t in r.trace] == list(range(1, r.iterations + 1))


def test_contract_instance_examples():
    inst = Instance.from_lists([[1, 1], [1, 2]])
    out, results = contract_instance(inst)
    assert out == inst and [r.gamma for r in results] == [0, 0]
    inst = Instance.from_lists([[3, 6, 12, 0], [1, 3, 5, 7]], [([1, 1, 1, 1], "ge", 2)])
    out, results = contract_instance(inst)
    assert out.objectives.as_lists() == [[1, 2, 4, 0], [1, 3, 5, 7]]
    assert out.constraints == inst.constraints
    out2, _ = contract_instance(inst, workers=2)
    assert out2 == out


def test_efficient_set_kept_by_instance_contraction():
    rng = random.Random(4)
    for _ in range(10):
        n = rng.randint(2, 8)
        objs = [[rng.randint(1, 200) for _ in range(n)] for _ in range(2)]
        inst = Instance.from_lists(objs, [([rng.randint(0, 3) for _ in range(n)], "ge", 2)])
        out, _ = contract_instance(inst)
        assert efficient_set(out) == efficient_set(inst)


@settings(max_examples=40)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=4))
def test_optimal_sum_matches_brute_force(c):
    r = contract_objective(c)
    value, _ = brute_force_min(c)
    assert sum(r.d) == value
    assert verify_ocpset_feasible(c, r.d) == []


def test_optimal_sum_matches_brute_force_six():
    rng = random.Random(6)
    for _ in range(8):
        c = [rng.randint(1, 12) for _ in range(6)]
        value, _ = brute_force_min(c, monotone=True)
        assert sum(contract_objective(c).d) == value


@settings(max_examples=40)
@given(small_c)
def test_result_invariants(c):
    r = contract_objective(c)
    assert r.gamma >= 0
    assert r.gamma == contraction_factor(c, r.d)
    assert verify_order_preserving(c, r.d) == []
    if r.status == NON_CONTRACTABLE:
        assert r.d == tuple(c) and r.gamma == 0


@settings(max_examples=30)
@given(small_c)
def test_idempotent(c):
    d = contract_objective(c).d
    again = contract_objective(d)
    assert again.d == d and again.status == NON_CONTRACTABLE


@settings(max_examples=30)
@given(small_c, st.integers(2, 40))
def test_scale_invariant(c, k):
    assert contract_objective([k * v for v in c]).d == contract_objective(c).d


@settings(max_examples=30)
@given(small_c, st.randoms(use_true_random=False))
def test_permutation_equivariant(c, rnd):
    perm = list(range(len(c)))
    rnd.shuffle(perm)
    d = contract_objective(c).d
    assert contract_objective([c[i] for i in perm]).d == tuple(d[i] for i in perm)


def test_cuts_are_violated_and_never_repeat(monkeypatch):
    seen = []
    real = contraction.separate

    def spy(c, d):
        row = real(c, d)
        seen.append((tuple(d), row))
        return row

    monkeypatch.setattr(contraction, "separate", spy)
    rng = random.Random(9)
    for _ in range(10):
        seen.clear()
        r = contract_objective([rng.randint(1, 500) for _ in range(rng.randint(2, 8))])
        rows = [row for _, row in seen if row is not None]
        assert len(rows) == len(set(rows)) == r.cuts_added
        assert all(not row.satisfied_by(d) for d, row in seen if row is not None)


def test_invalid_cut_guard(monkeypatch):
    # a separator that keeps returning an already-satisfied row must be caught
    monkeypatch.setattr(contraction, "oracle_a", lambda c, d: type("S", (), {
        "dsum": 1, "csum": -1, "T": frozenset({len(c) - 1}), "S": frozenset({0})})())
    with pytest.raises(InvalidCut):
        separate((1, 2, 4), (1, 2, 4))


@pytest.mark.parametrize("c, d", [
    ((4, 5486, 39, 4063, 6, 8203, 7645, 83, 72, 15, 281, 581),
     (4, 3556, 39, 2361, 6, 4968, 4505, 83, 72, 15, 243, 486)),
    ((9547, 48, 535, 485, 6, 607, 529, 8, 9588, 76, 93, 5839),
     (3745, 48, 401, 351, 6, 473, 395, 8, 3786, 76, 93, 1893)),
])
def test_wide_range_cases_stay_fast(c, d):
    # both once needed minutes under most-fractional branching
    r = contract_objective(c, ContractionConfig(time_limit=60))
    assert (r.d, r.status) == (d, OPTIMAL)
