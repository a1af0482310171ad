"""Exact branch-and-bound for the contraction master problem.

The master minimizes ``sum(d)`` over integer ``d`` in a box, subject to rows
with coefficients in ``{-1, 0, +1}`` of the form

    sum(d[T]) - sum(d[S]) >= 1      (strict)
    sum(d[T]) - sum(d[S]) == 0      (equal)

Nodes are pruned by interval propagation and, optionally, by an LP bound.
The LP itself is solved in floating point (HiGHS via scipy), but it is only
used to produce dual multipliers; the bound derived from them is evaluated
in exact integer arithmetic and is valid for any multipliers, so rounding
in the LP can weaken a bound but never make it wrong.

Among all optimal vectors the lexicographically smallest one is returned.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

_DUAL_SCALE = 1 << 32
_INTEGRAL_TOL = 1e-6
_MAX_PASSES = 40
_DUAL_LIMIT = float(1 << 24)


class MasterTimeout(Exception):
    """The deadline passed; ``best`` is the best vector found so far (or None)."""

    def __init__(self, best=None):
        super().__init__("master solve hit the deadline")
        self.best = best


class InvalidIncumbent(ValueError):
    pass


@dataclass(frozen=True)
class CutRow:
    """``sum(d[minus]) + 1 <= sum(d[plus])`` if strict, else ``sum(d[minus]) == sum(d[plus])``."""

    plus: frozenset[int]
    minus: frozenset[int]
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "plus", frozenset(self.plus))
        object.__setattr__(self, "minus", frozenset(self.minus))
        if self.plus & self.minus:
            raise ValueError("a row cannot use an index on both sides")

    def activity(self, d: Sequence[int]) -> int:
        return sum(d[i] for i in self.plus) - sum(d[i] for i in self.minus)

    def satisfied_by(self, d: Sequence[int]) -> bool:
        act = self.activity(d)
        return act >= 1 if self.strict else act == 0

    def __str__(self):
        lhs = " + ".join(f"d{i}" for i in sorted(self.minus)) or "0"
        rhs = " + ".join(f"d{i}" for i in sorted(self.plus)) or "0"
        return f"{lhs} + 1 <= {rhs}" if self.strict else f"{lhs} = {rhs}"


@dataclass
class MasterModel:
    nvars: int
    lower: list[int]
    upper: list[int]
    rows: list[CutRow] = field(default_factory=list)

    def __post_init__(self):
        if len(self.lower) != self.nvars or len(self.upper) != self.nvars:
            raise ValueError("bounds must have one entry per variable")
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi:
                raise ValueError(f"empty domain [{lo}, {hi}]")
        for row in self.rows:
            self._check_row(row)

    def _check_row(self, row: CutRow):
        if any(i < 0 or i >= self.nvars for i in row.plus | row.minus):
            raise ValueError(f"row {row} references an unknown variable")

    def add_row(self, row: CutRow):
        self._check_row(row)
        self.rows.append(row)

    def feasible(self, d: Sequence[int]) -> bool:
        if len(d) != self.nvars:
            return False
        if any(not lo <= v <= hi for v, lo, hi in zip(d, self.lower, self.upper)):
            return False
        return all(row.satisfied_by(d) for row in self.rows)


@dataclass
class SolveStats:
    nodes: int = 0
    lp_solves: int = 0
    value: int | None = None


class _Search:
    def __init__(self, model: MasterModel, deadline: float | None, use_lp: bool, stats: SolveStats):
        self.model = model
        self.n = model.nvars
        self.deadline = deadline
        self.use_lp = use_lp
        self.stats = stats
        self.rows = [(tuple(sorted(r.plus)), tuple(sorted(r.minus)), not r.strict)
                     for r in model.rows]
        self._build_propagation()
        if use_lp:
            self._build_lp()

    # -- propagation ------------------------------------------------------

    def _build_propagation(self):
        m, n = len(self.rows), self.n
        big = max(self.model.upper, default=0) * max(n, 1)
        self.dtype = np.int64 if big < (1 << 60) else object
        P = np.zeros((m, n), dtype=bool)
        N = np.zeros((m, n), dtype=bool)
        for i, (plus, minus, _) in enumerate(self.rows):
            P[i, list(plus)] = True
            N[i, list(minus)] = True
        eq = np.array([r[2] for r in self.rows], dtype=bool)
        self.P, self.N = P, N
        self.Pi, self.Ni = P.astype(self.dtype), N.astype(self.dtype)
        self.rhs = np.where(eq, 0, 1).astype(self.dtype)
        self.eq_rows = np.flatnonzero(eq)
        self.big = (1 << 62) if self.dtype is np.int64 else 1 << (2 * big.bit_length() + 2)

    def _colmin(self, mask, vals):
        return np.where(mask, vals[:, None], self.big).min(axis=0, initial=self.big)

    def propagate(self, lo: list[int], hi: list[int], cutoff: int | None) -> bool:
        """Tighten ``lo``/``hi`` in place; False means the box holds no feasible point."""
        L = np.array(lo, dtype=self.dtype)
        H = np.array(hi, dtype=self.dtype)
        P, N, Pi, Ni = self.P, self.N, self.Pi, self.Ni
        ok = True
        for _ in range(_MAX_PASSES):
            L0, H0 = L.copy(), H.copy()
            if cutoff is not None:
                slack = cutoff - L.sum()
                if slack < 0:
                    ok = False
                    break
                H = np.minimum(H, L + slack)
            if len(self.rows):
                excess = Pi @ H - Ni @ L - self.rhs
                if (excess < 0).any():
                    ok = False
                    break
                L = np.maximum(L, H - self._colmin(P, excess))
                H = np.minimum(H, L0 + self._colmin(N, excess))
                if len(self.eq_rows):
                    e = self.eq_rows
                    room = Ni[e] @ H0 - Pi[e] @ L0
                    if (room < 0).any():
                        ok = False
                        break
                    H = np.minimum(H, L0 + self._colmin(P[e], room))
                    L = np.maximum(L, H0 - self._colmin(N[e], room))
            if (L > H).any():
                ok = False
                break
            if (L == L0).all() and (H == H0).all():
                break
        if ok:
            lo[:] = [int(v) for v in L]
            hi[:] = [int(v) for v in H]
        return ok

    # -- LP bound ---------------------------------------------------------

    def _build_lp(self):
        A = np.zeros((len(self.rows), self.n), dtype=np.int64)
        for i, (plus, minus, _) in enumerate(self.rows):
            A[i, list(plus)] = 1
            A[i, list(minus)] = -1
        self.A_int = A
        self.eq_mask = np.array([r[2] for r in self.rows], dtype=bool)
        self.backend = _make_backend(A, self.eq_mask, self.model.lower, self.model.upper)

    def lp(self, lo, hi):
        """Return ``(status, x, exact_lower_bound)``; status is 'optimal', 'infeasible' or 'unknown'."""
        self.stats.lp_solves += 1
        status, x, y = self.backend.solve(lo, hi)
        if status != "optimal":
            return status, None, None
        bound = self._dual_bound(y, lo, hi)
        if bound is None:
            return "unknown", x, None
        return "optimal", x, bound

    def _dual_bound(self, y, lo, hi):
        # any multipliers give a valid bound once strict-row multipliers are clipped at zero
        y = np.array(y, dtype=float)
        strict = ~self.eq_mask
        y[strict] = np.maximum(y[strict], 0.0)
        if not np.all(np.isfinite(y)) or np.abs(y).max(initial=0.0) > _DUAL_LIMIT:
            return None
        yi = np.floor(y * _DUAL_SCALE).astype(np.int64)
        r = _DUAL_SCALE - yi @ self.A_int if len(yi) else np.full(self.n, _DUAL_SCALE, dtype=np.int64)
        scaled = int(yi[strict].sum()) + sum(min(int(rj) * l, int(rj) * h) for rj, l, h in zip(r, lo, hi))
        return -((-scaled) // _DUAL_SCALE)

    # -- helpers ----------------------------------------------------------

    def tick(self):
        self.stats.nodes += 1
        if self.deadline is not None and self.stats.nodes % 16 == 1 and time.monotonic() > self.deadline:
            return True
        return False

    def check(self, d) -> bool:
        return self.model.feasible(d)

    # -- phase 1: optimal value ---------------------------------------------

    def _evaluate(self, lo, hi, cutoff):
        """Propagate and bound a node in place; None if it can be discarded."""
        if not self.propagate(lo, hi, cutoff):
            return None
        bound, x = sum(lo), None
        if lo != hi and self.use_lp:
            status, x, lp_bound = self.lp(lo, hi)
            if status == "infeasible":
                return None
            if lp_bound is not None:
                bound = max(bound, lp_bound)
        if bound > cutoff:
            return None
        return bound, x

    def optimal_value(self, incumbent):
        """Best-first search on the bound; returns an optimal vector or None."""
        best = list(incumbent) if incumbent is not None else None
        cutoff = sum(best) - 1 if best is not None else sum(self.model.upper)
        heap = []
        order = itertools.count(0, -1)  # newest first among equal bounds

        def push(lo, hi):
            ev = self._evaluate(lo, hi, cutoff)
            if ev is not None:
                heapq.heappush(heap, (ev[0], next(order), lo, hi, ev[1]))

        push(list(self.model.lower), list(self.model.upper))
        while heap:
            if self.tick():
                raise MasterTimeout(best)
            bound, _, lo, hi, x = heapq.heappop(heap)
            if bound > cutoff:
                break
            if lo == hi:
                if self.check(lo):
                    best, cutoff = list(lo), sum(lo) - 1
                continue
            if x is not None:
                cand = self._integral(x, lo, hi)
                if cand is not None and sum(cand) <= cutoff:
                    best, cutoff = cand, sum(cand) - 1
                    if sum(cand) <= bound:
                        continue
            j, split, _ = self._branching(lo, hi, x)
            push(list(lo), hi[:j] + [split] + hi[j + 1:])
            push(lo[:j] + [split + 1] + lo[j + 1:], list(hi))
        return best

    def _branching(self, lo, hi, x):
        if x is not None:
            # first fractional index: callers order variables by coefficient, and
            # fixing small coefficients first settles the rounding cascade above them
            for j in range(self.n):
                if lo[j] == hi[j]:
                    continue
                v = x[j]
                frac = v - math.floor(v)
                if min(frac, 1 - frac) > _INTEGRAL_TOL:
                    split = min(max(math.floor(v), lo[j]), hi[j] - 1)
                    return j, split, frac >= 0.5
        # integral LP point or no LP: bisect the widest domain
        j = max(range(self.n), key=lambda k: hi[k] - lo[k])
        if x is not None:
            v = int(round(x[j]))
            split = min(max(v, lo[j]), hi[j] - 1)
        else:
            split = (lo[j] + hi[j]) // 2
        return j, split, False

    # -- phase 2: lexicographically smallest optimum --------------------------

    def lex_smallest(self, value: int, witness: list[int]):
        """Fix coordinates left to right; at each one, search for a strictly smaller optimum."""
        best = list(witness)
        lo, hi = list(self.model.lower), list(self.model.upper)
        for j in range(self.n):
            while best[j] > lo[j]:
                box_hi = hi[:j] + [best[j] - 1] + hi[j + 1:]
                found = self.find_point(list(lo), box_hi, value)
                if found is None:
                    break
                best = found
            lo[j] = hi[j] = best[j]
        return best

    def find_point(self, lo, hi, cap):
        """Any feasible point in the box with ``sum <= cap``, or None."""
        stack = [(lo, hi)]
        while stack:
            if self.tick():
                raise MasterTimeout(None)
            lo, hi = stack.pop()
            if not self.propagate(lo, hi, cap):
                continue
            if lo == hi:
                if self.check(lo):
                    return list(lo)
                continue
            x = None
            if self.use_lp:
                status, x, bound = self.lp(lo, hi)
                if status == "infeasible" or (status == "optimal" and bound > cap):
                    continue
                cand = self._integral(x, lo, hi) if x is not None else None
                if cand is not None and sum(cand) <= cap:
                    return cand
            j, split, up_first = self._branching(lo, hi, x)
            down = (lo, hi[:j] + [split] + hi[j + 1:])
            up = (lo[:j] + [split + 1] + lo[j + 1:], hi)
            stack.extend([down, up] if up_first else [up, down])
        return None

    def _integral(self, x, lo, hi):
        cand = [int(round(v)) for v in x]
        if (max(abs(v - w) for v, w in zip(x, cand)) < _INTEGRAL_TOL
                and all(l <= v <= h for v, l, h in zip(cand, lo, hi)) and self.check(cand)):
            return cand
        return None


class _HighsBackend:
    """One persistent HiGHS model; node solves only change column bounds."""

    def __init__(self, A, eq_mask, lower, upper):
        from scipy.optimize._highspy import _core

        self._status = _core.HighsModelStatus
        h = _core._Highs()
        h.setOptionValue("output_flag", False)
        inf = h.getInfinity()
        m, n = A.shape
        self.n = n
        self.idx = np.arange(n, dtype=np.int32)
        empty = np.zeros(0, dtype=np.int32)
        h.addCols(n, np.ones(n), np.asarray(lower, dtype=float), np.asarray(upper, dtype=float),
                  0, empty, empty, np.zeros(0))
        if m:
            starts, cols, vals = [], [], []
            for i in range(m):
                nz = np.flatnonzero(A[i])
                starts.append(len(cols))
                cols.extend(nz.tolist())
                vals.extend(A[i, nz].tolist())
            h.addRows(m, np.where(eq_mask, 0.0, 1.0), np.where(eq_mask, 0.0, inf), len(cols),
                      np.asarray(starts, dtype=np.int32), np.asarray(cols, dtype=np.int32),
                      np.asarray(vals, dtype=float))
        self.h = h

    def solve(self, lo, hi):
        h = self.h
        h.changeColsBounds(self.n, self.idx, np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        h.run()
        status = h.getModelStatus()
        if status == self._status.kInfeasible:
            return "infeasible", None, None
        if status != self._status.kOptimal:
            return "unknown", None, None
        sol = h.getSolution()
        return "optimal", np.asarray(sol.col_value), np.asarray(sol.row_dual)


class _LinprogBackend:
    """Fallback through the public ``linprog`` interface (slower per call)."""

    def __init__(self, A, eq_mask, lower, upper):
        self.A = A.astype(float)
        self.eq = eq_mask

    def solve(self, lo, hi):
        A, eq = self.A, self.eq
        ineq = ~eq
        # strict rows a.x >= 1 become -a.x <= -1
        res = linprog(np.ones(A.shape[1]),
                      A_ub=-A[ineq] if ineq.any() else None,
                      b_ub=-np.ones(int(ineq.sum())) if ineq.any() else None,
                      A_eq=A[eq] if eq.any() else None, b_eq=np.zeros(int(eq.sum())) if eq.any() else None,
                      bounds=list(zip(lo, hi)), method="highs")
        if res.status == 2:
            return "infeasible", None, None
        if res.status != 0:
            return "unknown", None, None
        y = np.zeros(len(A))
        if ineq.any():
            y[ineq] = -np.asarray(res.ineqlin.marginals)
        if eq.any():
            y[eq] = np.asarray(res.eqlin.marginals)
        return "optimal", res.x, y


def _make_backend(A, eq_mask, lower, upper):
    try:
        return _HighsBackend(A, eq_mask, lower, upper)
    except (ImportError, AttributeError):
        return _LinprogBackend(A, eq_mask, lower, upper)


def solve_master(model: MasterModel, incumbent: Sequence[int] | None = None, *,
                 deadline: float | None = None, use_lp: bool = True,
                 stats: SolveStats | None = None,
                 settle_at: int | None = None) -> list[int] | None:
    """Minimize ``sum(d)`` over the model; ``None`` means the model is infeasible.

    ``incumbent`` must satisfy every row and bound. ``deadline`` is a
    ``time.monotonic()`` value; passing it raises :class:`MasterTimeout`.
    If the optimal value equals ``settle_at`` the first optimum found is
    returned without the lexicographic pass.
    """
    if incumbent is not None and not model.feasible(list(incumbent)):
        raise InvalidIncumbent("the incumbent violates the current master model")
    stats = stats if stats is not None else SolveStats()
    search = _Search(model, deadline, use_lp, stats)
    best = search.optimal_value(incumbent)
    if best is None:
        return None
    value = sum(best)
    stats.value = value
    result = best if value == settle_at else search.lex_smallest(value, best)
    if not model.feasible(result) or sum(result) != value:
        raise AssertionError("master solution failed its post-check")
    return result
