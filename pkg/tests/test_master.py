import itertools
import random
import time

import pytest

from objcontract.contraction import initial_rows
from objcontract.ipkernel.master import (
    CutRow,
    InvalidIncumbent,
    MasterModel,
    MasterTimeout,
    SolveStats,
    solve_master,
)


def brute(model):
    ranges = [range(lo, hi + 1) for lo, hi in zip(model.lower, model.upper)]
    pts = [list(p) for p in itertools.product(*ranges) if model.feasible(list(p))]
    return min(pts, key=lambda p: (sum(p), p)) if pts else None


def test_examples():
    m = MasterModel(2, [1, 1], [10, 10], [CutRow({1}, {0})])
    assert solve_master(m) == [1, 2]
    m = MasterModel(2, [1, 1], [10, 10], [CutRow({1}, {0}, strict=False)])
    assert solve_master(m) == [1, 1]


def test_worked_four_variable_example():
    rows = initial_rows((2, 3, 4, 9)) + [
        CutRow({3}, {1, 2}),
        CutRow({3}, {0, 1, 2}, strict=False),
        CutRow({0, 1}, {2}),
    ]
    m = MasterModel(4, [1] * 4, [9] * 4, rows)
    got = solve_master(m, [2, 3, 4, 9])
    assert sum(got) == 18
    assert got == brute(m)


def test_infeasible_model_returns_none():
    m = MasterModel(2, [1, 1], [3, 3], [CutRow({1}, {0}), CutRow({0}, {1})])
    assert solve_master(m) is None
    assert solve_master(m, use_lp=False) is None


def test_invalid_incumbent_rejected():
    m = MasterModel(2, [1, 1], [5, 5], [CutRow({1}, {0})])
    with pytest.raises(InvalidIncumbent):
        solve_master(m, [2, 2])


def test_row_validation():
    with pytest.raises(ValueError):
        CutRow({0, 1}, {1})
    m = MasterModel(2, [1, 1], [5, 5])
    with pytest.raises(ValueError):
        m.add_row(CutRow({2}, {0}))
    with pytest.raises(ValueError):
        MasterModel(1, [3], [2])


def test_cut_row_text():
    assert str(CutRow({2}, {0, 1})) == "d0 + d1 + 1 <= d2"
    assert str(CutRow({2}, {0, 1}, strict=False)) == "d0 + d1 = d2"


def _random_model(rng):
    n = rng.randint(1, 5)
    lo = rng.randint(0, 1)
    m = MasterModel(n, [lo] * n, [rng.randint(lo + 1, 7)] * n)
    for _ in range(rng.randint(0, 6)):
        if n < 2:
            break
        idx = rng.sample(range(n), rng.randint(2, n))
        k = rng.randint(1, len(idx) - 1)
        m.add_row(CutRow(set(idx[:k]), set(idx[k:]), strict=rng.random() < 0.75))
    return m


@pytest.mark.parametrize("use_lp", [True, False])
def test_matches_exhaustive_lexicographic_optimum(use_lp):
    rng = random.Random(42 + use_lp)
    for _ in range(150):
        m = _random_model(rng)
        expected = brute(m)
        assert solve_master(m, use_lp=use_lp) == expected
        if expected is not None:
            # any feasible incumbent leads to the same answer, never worse than it
            inc = max((list(p) for p in itertools.product(*[range(a, b + 1) for a, b in zip(m.lower, m.upper)])
                       if m.feasible(list(p))), key=sum)
            stats = SolveStats()
            got = solve_master(m, inc, use_lp=use_lp, stats=stats)
            assert got == expected and stats.value <= sum(inc)


def test_settle_at_skips_tie_break():
    # optimum 1 is attained by (0, 1) and (1, 0); only the tie-break pass guarantees (0, 1)
    m = MasterModel(2, [0, 0], [4, 4], [CutRow({0, 1}, set())])
    assert solve_master(m) == [0, 1]
    got = solve_master(m, [4, 0], settle_at=1)
    assert sum(got) == 1 and m.feasible(got)


def test_deadline_raises_with_incumbent():
    # an expired deadline trips on the first node
    rows = initial_rows(tuple(range(1, 13)))
    m = MasterModel(12, [1] * 12, [10_000] * 12, rows)
    inc = [v * 100 for v in range(1, 13)]
    with pytest.raises(MasterTimeout) as info:
        solve_master(m, inc, deadline=time.monotonic() - 1)
    assert info.value.best == inc


def test_large_bounds_use_exact_arithmetic():
    top = 10 ** 20
    m = MasterModel(3, [1] * 3, [top] * 3, initial_rows((1, 2, 3)) + [CutRow({2}, {0, 1}, strict=False)])
    assert solve_master(m, [1, 2, 3]) == [1, 2, 3]
