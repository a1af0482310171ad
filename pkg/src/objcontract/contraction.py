"""Exact contraction of linear objective coefficients by cutting planes.

For one objective with coefficients ``c`` the driver looks for the integer
vector ``d`` of minimal total size that induces exactly the same order
(including ties) on all binary solutions. The master problem starts from
the constraints between neighbouring sorted coefficients; violated
disjoint-subset constraints are then separated with oracle A and, when A
finds nothing, oracle B, until both come back empty.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import CoefficientVector, Instance, as_coeffs, contraction_factor
from .ipkernel.master import CutRow, MasterModel, MasterTimeout, SolveStats, solve_master
from .ipkernel.oracles import oracle_a, oracle_b

OPTIMAL = "optimal"
TIMEOUT = "timeout-incumbent"
NON_CONTRACTABLE = "non-contractable"

REJECT = "reject"
SPLIT = "split"


class SignedInputError(ValueError):
    """Mixed-sign coefficients were given while signed handling is set to reject."""


class InvalidCut(RuntimeError):
    """A separated row is not violated, repeats, or leaves the master infeasible."""


@dataclass(frozen=True)
class ContractionConfig:
    time_limit: float = 600.0
    max_cuts: int = 100_000
    signed_mode: str = REJECT
    emit_trace: bool = False
    use_lp: bool = True

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.max_cuts <= 0:
            raise ValueError("max_cuts must be positive")
        if self.signed_mode not in (REJECT, SPLIT):
            raise ValueError(f"unknown signed_mode {self.signed_mode!r}")


@dataclass
class ContractionResult:
    d: tuple[int, ...]
    status: str
    gamma: Fraction
    cuts_added: int
    iterations: int
    elapsed: float
    trace: list[tuple[int, int, int]] | None = None
    cuts: list[CutRow] = field(default_factory=list, repr=False)

    @property
    def d_vector(self) -> CoefficientVector:
        return CoefficientVector(self.d)


@dataclass(frozen=True)
class Preprocessed:
    """Sorted nonzero magnitudes plus what is needed to undo the sort.

    ``core[k]`` is ``abs(c[perm[k]])``; ``signs[i]`` is -1, 0 or +1.
    """

    core: tuple[int, ...]
    perm: tuple[int, ...]
    tie_classes: tuple[tuple[int, ...], ...]
    zero_index: frozenset[int]
    signs: tuple[int, ...]

    def restore(self, core_values: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(self.signs)
        for k, i in enumerate(self.perm):
            out[i] = self.signs[i] * core_values[k]
        return tuple(out)


def preprocess(c: CoefficientVector | Sequence[int]) -> Preprocessed:
    c = as_coeffs(c)
    signs = tuple((v > 0) - (v < 0) for v in c)
    nonzero = [i for i, v in enumerate(c) if v != 0]
    perm = tuple(sorted(nonzero, key=lambda i: (abs(c[i]), i)))
    core = tuple(abs(c[i]) for i in perm)
    classes: dict[int, list[int]] = {}
    for i in perm:
        classes.setdefault(abs(c[i]), []).append(i)
    ties = tuple(tuple(v) for v in classes.values() if len(v) > 1)
    zeros = frozenset(i for i, v in enumerate(c) if v == 0)
    return Preprocessed(core, perm, ties, zeros, signs)


def initial_rows(c_sorted: Sequence[int]) -> list[CutRow]:
    """Equal or strict rows between neighbouring entries of an ascending vector."""
    rows = []
    for i in range(len(c_sorted) - 1):
        if c_sorted[i] > c_sorted[i + 1]:
            raise ValueError("initial_rows expects coefficients in ascending order")
        strict = c_sorted[i] != c_sorted[i + 1]
        rows.append(CutRow(plus={i + 1}, minus={i}, strict=strict))
    return rows


def separate(c: Sequence[int], d: Sequence[int]) -> CutRow | None:
    """Return a row violated by ``d`` (A first, then B), or None if ``d`` is feasible."""
    a = oracle_a(c, d)
    row = None
    if a.dsum > 0:
        row = CutRow(plus=a.T, minus=a.S, strict=a.csum != 0)
    else:
        b = oracle_b(c, d)
        if b.csum < 0:
            row = CutRow(plus=b.T, minus=b.S, strict=True)
    if row is not None and row.satisfied_by(d):
        raise InvalidCut(f"separated row {row} is not violated by {tuple(d)}")
    return row


class _Problem:
    """How the generic loop talks to a master: positive (d) or split (d = p - n)."""

    def __init__(self, c_sorted: tuple[int, ...], split: bool):
        self.c = c_sorted
        self.m = len(c_sorted)
        self.split = split
        top = max(abs(v) for v in c_sorted)
        if split:
            self.model = MasterModel(2 * self.m, [0] * (2 * self.m), [top] * (2 * self.m))
            self.warm = [max(v, 0) for v in c_sorted] + [max(-v, 0) for v in c_sorted]
        else:
            self.model = MasterModel(self.m, [1] * self.m, [top] * self.m)
            self.warm = list(c_sorted)
        for row in initial_rows(c_sorted):
            self.model.add_row(self.lift_row(row))

    def lift_row(self, row: CutRow) -> CutRow:
        if not self.split:
            return row
        m = self.m
        plus = {i for i in row.plus} | {m + i for i in row.minus}
        minus = {i for i in row.minus} | {m + i for i in row.plus}
        return CutRow(plus=plus, minus=minus, strict=row.strict)

    def project(self, x: Sequence[int]) -> list[int]:
        if not self.split:
            return list(x)
        return [x[i] - x[self.m + i] for i in range(self.m)]


def _cutting_plane(problem: _Problem, cfg: ContractionConfig, start: float):
    """Run the separate/re-solve loop. Returns ``(d_sorted, status, cuts, iterations, trace)``."""
    deadline = start + cfg.time_limit
    model = problem.model
    cuts: list[CutRow] = []
    seen: set[CutRow] = set()
    trace: list[tuple[int, int, int]] = []
    upper = sum(problem.warm)
    previous = None
    iterations = 0
    while True:
        if time.monotonic() > deadline or len(cuts) >= cfg.max_cuts:
            return problem.c, TIMEOUT, cuts, iterations, trace
        offer = previous if previous is not None and model.feasible(previous) else problem.warm
        stats = SolveStats()
        try:
            # at sum(c) the answer is c itself, so the tie-break pass is skipped
            x = solve_master(model, offer, deadline=deadline, use_lp=cfg.use_lp, stats=stats,
                             settle_at=upper)
        except MasterTimeout:
            return problem.c, TIMEOUT, cuts, iterations, trace
        if x is None:
            raise InvalidCut("master became infeasible; a separated row must be invalid")
        if sum(x) == upper:
            # c attains the bound and satisfies every row, so it is optimal
            x = list(problem.warm)
        iterations += 1
        d = problem.project(x)
        row = separate(problem.c, d)
        if row is None:
            if cfg.emit_trace:
                trace.append((iterations, sum(x), sum(x)))
            return tuple(d), OPTIMAL, cuts, iterations, trace
        if cfg.emit_trace:
            trace.append((iterations, upper, sum(x)))
        if row in seen:
            raise InvalidCut(f"row {row} was separated twice")
        seen.add(row)
        cuts.append(row)
        model.add_row(problem.lift_row(row))
        previous = x


def contract_objective(c: CoefficientVector | Sequence[int],
                       config: ContractionConfig | None = None) -> ContractionResult:
    """Smallest order-preserving integer coefficients for one objective."""
    cfg = config or ContractionConfig()
    c = as_coeffs(c)
    if not c:
        raise ValueError("cannot contract an empty coefficient vector")
    if any(v < 0 for v in c):
        if cfg.signed_mode == REJECT:
            raise SignedInputError("negative coefficients need signed_mode='split'")
        return contract_signed(c, cfg)
    return _contract(c, cfg, split=False)


def contract_signed(c: CoefficientVector | Sequence[int],
                    config: ContractionConfig | None = None) -> ContractionResult:
    """Signed variant: ``d = p - n`` with ``p, n >= 0`` and ``sum(p + n)`` minimized.

    The oracles see the signed coefficients as they are; only the master
    changes.
    """
    cfg = config or ContractionConfig(signed_mode=SPLIT)
    return _contract(as_coeffs(c), cfg, split=True)


def _contract(c: tuple[int, ...], cfg: ContractionConfig, split: bool) -> ContractionResult:
    start = time.monotonic()
    pre = preprocess(c)
    if not pre.core:
        return ContractionResult(c, NON_CONTRACTABLE, Fraction(0), 0, 0, time.monotonic() - start,
                                 [] if cfg.emit_trace else None)
    if split:
        # signed values sorted ascending; zeros are dropped as in the positive case
        perm = tuple(sorted((i for i, v in enumerate(c) if v != 0), key=lambda i: (c[i], i)))
        c_sorted = tuple(c[i] for i in perm)
    else:
        perm, c_sorted = pre.perm, pre.core
    problem = _Problem(c_sorted, split)
    d_sorted, status, cuts, iterations, trace = _cutting_plane(problem, cfg, start)

    d = [0] * len(c)
    for k, i in enumerate(perm):
        d[i] = d_sorted[k]
    d = tuple(d)
    size_c = sum(abs(v) for v in c)
    size_d = sum(abs(v) for v in d)
    if status == TIMEOUT or size_d >= size_c:
        d = c
        size_d = size_c
        if status == OPTIMAL:
            status = NON_CONTRACTABLE
    gamma = Fraction(size_c - size_d, size_c)
    if not split:
        assert gamma == contraction_factor(c, d)
    return ContractionResult(d, status, gamma, len(cuts), iterations, time.monotonic() - start,
                             trace if cfg.emit_trace else None, cuts)


def _contract_row(args):
    row, cfg = args
    return contract_objective(row, cfg)


def contract_instance(instance: Instance, config: ContractionConfig | None = None,
                      workers: int = 1) -> tuple[Instance, list[ContractionResult]]:
    """Contract every objective independently; constraints are left untouched."""
    cfg = config or ContractionConfig()
    rows = [r.coeffs for r in instance.objectives.rows]
    if workers > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_contract_row, [(r, cfg) for r in rows]))
    else:
        results = [contract_objective(r, cfg) for r in rows]
    return instance.with_objectives([r.d for r in results]), results
