"""Coefficient samplers and a timed study runner over (sampler, n, k) grids.

Random numbers come from numpy's PCG64 bit generator. Every sample gets its
own seed, derived with ``SeedSequence(base_seed, spawn_key=cell)`` where
``cell = (sampler index, n, k, sample index)``; a sample therefore does not
depend on which other cells are run or in what order.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .contraction import NON_CONTRACTABLE, OPTIMAL, ContractionConfig, contract_objective
from .enumeration import SIGNATURE_CAP, verify_order_preserving

UNIFORM = "uniform"
ORDER_OF_MAGNITUDE = "order-of-magnitude"
LOGARITHMIC = "logarithmic"
KINDS = (UNIFORM, ORDER_OF_MAGNITUDE, LOGARITHMIC)
ALIASES = {"uniform": UNIFORM, "oom": ORDER_OF_MAGNITUDE, "order-of-magnitude": ORDER_OF_MAGNITUDE,
           "log": LOGARITHMIC, "logarithmic": LOGARITHMIC}

CSV_HEADER = "sampler,n,k,sample,runtime_ms,gamma_pct,status,cuts"


def kind_from_name(name: str) -> str:
    try:
        return ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown sampler {name!r}; choose from uniform, oom, log") from None


@dataclass(frozen=True)
class SamplerSpec:
    kind: str
    lo: int
    hi: int
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if not 1 <= self.lo < self.hi:
            raise ValueError(f"sampler range needs 1 <= lo < hi, got [{self.lo}, {self.hi}]")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def decades(lo: int, hi: int) -> list[tuple[int, int]]:
    """Decade intervals meeting ``[lo, hi]``, clipped to it.

    A top endpoint that is itself a power of ten is folded into the decade
    below rather than forming a one-value interval.
    """
    out = []
    j = len(str(lo)) - 1
    while 10 ** j <= hi:
        a, b = max(10 ** j, lo), min(10 ** (j + 1) - 1, hi)
        out.append((a, b))
        j += 1
    if len(out) > 1 and out[-1][0] == out[-1][1] == hi:
        out.pop()
        out[-1] = (out[-1][0], hi)
    return out


def sample(spec: SamplerSpec, n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("need at least one coefficient")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    lo, hi = spec.lo, spec.hi
    if spec.kind == UNIFORM:
        vals = rng.integers(lo, hi, endpoint=True, size=n)
    elif spec.kind == ORDER_OF_MAGNITUDE:
        parts = decades(lo, hi)
        pick = rng.integers(0, len(parts), size=n)
        vals = [rng.integers(parts[p][0], parts[p][1], endpoint=True) for p in pick]
    else:
        u = rng.uniform(np.log(lo), np.log(hi), size=n)
        vals = np.clip(np.rint(np.exp(u)), lo, hi)
    return tuple(int(v) for v in vals)


def cell_seed(base_seed: int, kind: str, n: int, k: int, index: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(KINDS.index(kind), n, k, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class StudyGrid:
    samplers: tuple[str, ...] = KINDS
    n_values: tuple[int, ...] = (5, 6, 7, 8)
    k_values: tuple[int, ...] = (3, 4)
    samples_per_cell: int = 5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "samplers", tuple(kind_from_name(s) for s in self.samplers))
        if not (self.samplers and self.n_values and self.k_values):
            raise ValueError("every grid axis needs at least one value")
        if self.samples_per_cell < 1:
            raise ValueError("samples_per_cell must be positive")
        if any(n < 1 for n in self.n_values) or any(k < 1 for k in self.k_values):
            raise ValueError("n and k values must be positive")

    def cells(self) -> list[tuple[str, int, int, int]]:
        return [(s, n, k, i) for s in self.samplers for n in self.n_values
                for k in self.k_values for i in range(self.samples_per_cell)]

    def spec(self, kind: str, n: int, k: int, index: int) -> SamplerSpec:
        return SamplerSpec(kind, 1, 10 ** k, cell_seed(self.seed, kind, n, k, index))


@dataclass
class StudyRecord:
    sampler: str
    n: int
    range_hi: int
    sample_index: int
    runtime: float  # seconds, monotonic clock
    gamma: Fraction
    status: str
    cuts: int
    k: int = 0
    c: tuple[int, ...] = field(default=(), repr=False)
    d: tuple[int, ...] = field(default=(), repr=False)
    verified: bool | None = None

    @property
    def contractable(self) -> bool:
        return self.status == OPTIMAL and self.gamma > 0

    def csv_row(self) -> str:
        return ",".join([self.sampler, str(self.n), str(self.k), str(self.sample_index),
                         f"{self.runtime * 1000:.1f}", f"{float(100 * self.gamma):.4f}",
                         self.status, str(self.cuts)])


def _run_cell(args) -> StudyRecord:
    kind, n, k, index, spec, cfg = args
    c = sample(spec, n)
    start = time.monotonic()
    res = contract_objective(c, cfg)
    runtime = time.monotonic() - start
    verified = None
    if res.status == OPTIMAL and n <= SIGNATURE_CAP:
        verified = not verify_order_preserving(c, res.d)
    return StudyRecord(kind, n, spec.hi, index, runtime, res.gamma, res.status, res.cuts_added,
                       k, c, res.d, verified)


def run_study(grid: StudyGrid, config: ContractionConfig | None = None, *, workers: int = 1,
              progress: Callable[[StudyRecord], None] | None = None) -> list[StudyRecord]:
    cfg = config or ContractionConfig()
    jobs = [(s, n, k, i, grid.spec(s, n, k, i), cfg) for s, n, k, i in grid.cells()]
    records = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_run_cell, jobs):
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        for job in jobs:
            rec = _run_cell(job)
            records.append(rec)
            if progress:
                progress(rec)
    order = {kind: i for i, kind in enumerate(KINDS)}
    records.sort(key=lambda r: (order[r.sampler], r.n, r.k, r.sample_index))
    return records


def to_csv(records: Iterable[StudyRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(r.csv_row() + "\n")
    return buf.getvalue()


def quantiles(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    """min, q1, median, q3, max with linear interpolation."""
    q = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return tuple(float(v) for v in q)


@dataclass
class GroupSummary:
    key: tuple
    count: int
    runtime_ms: tuple[float, ...]
    gamma_pct: tuple[float, ...]
    contractable: float
    non_contractable: int
    timeouts: int


@dataclass
class StudySummary:
    by_n: list[GroupSummary]
    by_sampler: list[GroupSummary]
    csv: str

    def table(self) -> str:
        lines = []
        for title, groups in (("n", self.by_n), ("sampler", self.by_sampler)):
            lines.append(f"{title:>20} {'count':>5} {'gamma% min/q1/med/q3/max':>38} "
                         f"{'runtime ms median':>18} {'contractable':>12}")
            for g in groups:
                gam = "/".join(f"{v:.1f}" for v in g.gamma_pct)
                lines.append(f"{str(g.key[0]):>20} {g.count:>5} {gam:>38} "
                             f"{g.runtime_ms[2]:>18.1f} {g.contractable:>12.2f}")
            lines.append("")
        return "\n".join(lines)


def _group(records, keyfn) -> list[GroupSummary]:
    groups: dict[tuple, list[StudyRecord]] = {}
    for r in records:
        groups.setdefault(keyfn(r), []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: tuple(KINDS.index(v) if v in KINDS else v for v in k)):
        rs = groups[key]
        out.append(GroupSummary(
            key, len(rs),
            quantiles([r.runtime * 1000 for r in rs]),
            quantiles([float(100 * r.gamma) for r in rs]),
            sum(r.contractable for r in rs) / len(rs),
            sum(r.status == NON_CONTRACTABLE for r in rs),
            sum(r.status not in (OPTIMAL, NON_CONTRACTABLE) for r in rs),
        ))
    return out


def summarize(records: Sequence[StudyRecord]) -> StudySummary:
    if not records:
        raise ValueError("nothing to summarize")
    return StudySummary(_group(records, lambda r: (r.n,)),
                        _group(records, lambda r: (r.sampler,)),
                        to_csv(records))
