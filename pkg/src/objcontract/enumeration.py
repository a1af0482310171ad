"""Brute-force ground truth over the binary hypercube.

These routines are the correctness oracles for everything else in the
package, so they refuse to run past their caps instead of checking a
partial state space.

Binary vectors are indexed by their encoding ``b = sum_j x_j 2**j``, i.e.
bit ``j`` of the index is ``x_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import (
    CoefficientVector,
    DimensionError,
    Instance,
    ParetoSet,
    Point,
    as_coeffs,
)

FEASIBLE_CAP = 24
SIGNATURE_CAP = 20
OCPSET_CAP = 14

ORDER_FLIP = "order-flip"
TIE_BROKEN = "tie-broken"
TIE_CREATED = "tie-created"
BOUND = "bound"

_CHUNK = 1 << 18
_INT64_SAFE = 1 << 62


class CapExceeded(ValueError):
    """The requested enumeration is larger than the hard cap allows."""


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise CapExceeded(f"{what} needs n <= {cap}, got n = {n}")


def _exact_matrix(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Pack integer rows into int64 when every signed sum fits, else object dtype."""
    arr = np.array([[int(v) for v in r] for r in rows], dtype=object)
    if arr.size == 0:
        return arr.astype(np.int64)
    bound = max(sum(abs(int(v)) for v in r) for r in rows)
    if bound < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


def binary_chunks(n: int, chunk: int = _CHUNK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(codes, X)`` blocks covering all of ``{0,1}^n`` in ascending code order."""
    bits = np.arange(n, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield codes, ((codes[:, None] >> bits) & 1).astype(np.int8)


def ternary_chunks(n: int, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """Yield blocks of ``{-1,0,1}^n`` in lexicographic order (``z_0`` most significant)."""
    total = 3 ** n
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        Z = np.empty((len(codes), n), dtype=np.int8)
        rest = codes
        for i in range(n - 1, -1, -1):
            Z[:, i] = rest % 3
            rest = rest // 3
        yield Z - 1


def _dot(X: np.ndarray, M: np.ndarray) -> np.ndarray:
    if M.dtype == object:
        return X.astype(object) @ M.T
    return X.astype(np.int64) @ M.T


def unpack(code: int, n: int) -> tuple[int, ...]:
    return tuple((code >> j) & 1 for j in range(n))


# ---------------------------------------------------------------------------
# feasible set and Pareto front


def _feasible_blocks(instance: Instance, cap: int):
    n = instance.nvars
    _check_cap(n, cap, "enumerating the feasible set")
    C = _exact_matrix(instance.objectives.as_lists())
    cons = instance.constraints
    A = _exact_matrix([c.coeffs for c in cons]) if cons else None
    for codes, X in binary_chunks(n):
        mask = np.ones(len(codes), dtype=bool)
        if A is not None:
            lhs = _dot(X, A)
            for k, con in enumerate(cons):
                col = lhs[:, k]
                if con.sense == "le":
                    mask &= col <= con.rhs
                elif con.sense == "ge":
                    mask &= col >= con.rhs
                else:
                    mask &= col == con.rhs
        if mask.any():
            yield codes[mask], X[mask], _dot(X[mask], C)


def enumerate_feasible(instance: Instance, cap: int = FEASIBLE_CAP) -> list[tuple[tuple[int, ...], Point]]:
    """All feasible ``x`` with their images ``f(x)``, in ascending code order."""
    out = []
    for _, X, Y in _feasible_blocks(instance, cap):
        for x, y in zip(X.tolist(), Y.tolist()):
            out.append((tuple(x), tuple(int(v) for v in y)))
    return out


def _nondominated_rows(P: np.ndarray) -> np.ndarray:
    """Boolean mask of non-dominated rows in a matrix of distinct points."""
    order = np.lexsort(P.T[::-1])
    keep = np.zeros(len(P), dtype=bool)
    front = []
    for idx in order:
        q = P[idx]
        if front:
            F = np.array(front)
            if np.any(np.all(F <= q, axis=1) & np.any(F < q, axis=1)):
                continue
        front.append(q)
        keep[idx] = True
    return keep


def pareto_front(instance: Instance, cap: int = FEASIBLE_CAP) -> ParetoSet:
    """Exact non-dominated set with every efficient solution attached."""
    codes_all, Y_all = [], []
    for codes, _, Y in _feasible_blocks(instance, cap):
        codes_all.append(codes)
        Y_all.append(Y)
    result = ParetoSet()
    if not codes_all:
        return result
    codes = np.concatenate(codes_all)
    Y = np.concatenate(Y_all)
    uniq, inverse = np.unique(Y, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    keep = _nondominated_rows(uniq)
    n = instance.nvars
    for u in np.flatnonzero(keep):
        point = tuple(int(v) for v in uniq[u])
        result.entries[point] = [unpack(int(b), n) for b in codes[inverse == u]]
    return result


def efficient_set(instance: Instance, cap: int = FEASIBLE_CAP) -> set[tuple[int, ...]]:
    return pareto_front(instance, cap).solutions


# ---------------------------------------------------------------------------
# order signatures and order preservation


def subset_sums(c: Sequence[int], cap: int = SIGNATURE_CAP) -> np.ndarray:
    """``c . x`` for every ``x`` in ``{0,1}^n``, indexed by the code of ``x``."""
    c = as_coeffs(c)
    _check_cap(len(c), cap, "materializing all subset sums")
    M = _exact_matrix([c])
    return np.concatenate([_dot(X, M)[:, 0] for _, X in binary_chunks(len(c))])


@dataclass(frozen=True, eq=False)
class OrderSignature:
    """Dense rank of every subset sum; equal sums share a rank."""

    ranks: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, OrderSignature):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks)

    def __hash__(self):
        return hash(self.ranks.tobytes())

    def __len__(self):
        return len(self.ranks)

    @property
    def classes(self) -> int:
        return int(self.ranks.max()) + 1


def order_signature(c: CoefficientVector | Sequence[int], cap: int = SIGNATURE_CAP) -> OrderSignature:
    sums = subset_sums(c, cap)
    _, inverse = np.unique(sums, return_inverse=True)
    return OrderSignature(np.asarray(inverse, dtype=np.int64).reshape(-1))


@dataclass(frozen=True)
class ViolationReport:
    """One pair ``(x, y)`` whose comparison changes between ``c`` and ``d``.

    ``original_values`` are ``(c.x, c.y)`` and ``transformed_values``
    are ``(d.x, d.y)``.
    """

    kind: str
    x: tuple[int, ...]
    y: tuple[int, ...]
    original_values: tuple[int, int]
    transformed_values: tuple[int, int]

    def is_genuine(self) -> bool:
        (a, b), (u, v) = self.original_values, self.transformed_values
        if self.kind == ORDER_FLIP:
            return a < b and u > v
        if self.kind == TIE_CREATED:
            return a != b and u == v
        if self.kind == TIE_BROKEN:
            return a == b and u != v
        if self.kind == BOUND:
            return True
        return False

    def recheck(self, c: Sequence[int], d: Sequence[int]) -> bool:
        """Recompute the stored values from ``c`` and ``d`` and confirm the violation."""
        dot = lambda w, z: sum(wi * zi for wi, zi in zip(w, z))
        if self.kind == BOUND:
            return self.transformed_values[0] == dot(d, self.x)
        return (self.original_values == (dot(c, self.x), dot(c, self.y))
                and self.transformed_values == (dot(d, self.x), dot(d, self.y))
                and self.is_genuine())


def _report(kind, bx, by, c_sums, d_sums, n) -> ViolationReport:
    return ViolationReport(kind, unpack(int(bx), n), unpack(int(by), n),
                           (int(c_sums[bx]), int(c_sums[by])),
                           (int(d_sums[bx]), int(d_sums[by])))


def verify_order_preserving(c: CoefficientVector | Sequence[int],
                            d: CoefficientVector | Sequence[int],
                            cap: int = SIGNATURE_CAP) -> list[ViolationReport]:
    """Empty iff ``c`` and ``d`` induce the same order (ties included) on ``{0,1}^n``.

    Otherwise one witness pair is returned for each kind of violation present.
    """
    c, d = as_coeffs(c), as_coeffs(d)
    if len(c) != len(d):
        raise DimensionError(f"coefficient vectors of length {len(c)} and {len(d)}")
    n = len(c)
    cs, ds = subset_sums(c, cap), subset_sums(d, cap)
    reports: list[ViolationReport] = []

    order = np.lexsort((ds, cs))
    c_sorted, d_sorted = cs[order], ds[order]
    new_group = np.ones(len(order), dtype=bool)
    new_group[1:] = c_sorted[1:] != c_sorted[:-1]
    starts = np.flatnonzero(new_group)
    group_start = starts[np.cumsum(new_group) - 1]

    # c-ties that d separates: within a sorted group d must be constant
    ends = np.append(starts[1:], len(order)) - 1
    broken = np.flatnonzero(d_sorted[starts] != d_sorted[ends])
    if len(broken):
        g = broken[0]
        reports.append(_report(TIE_BROKEN, order[starts[g]], order[ends[g]], cs, ds, n))

    # strictly smaller c with strictly larger d
    running_max = np.maximum.accumulate(d_sorted)
    has_prev = group_start > 0
    prev_max = np.where(has_prev, running_max[np.maximum(group_start - 1, 0)], d_sorted)
    flips = np.flatnonzero(has_prev & (d_sorted < prev_max))
    if len(flips):
        j = flips[0]
        k = int(np.flatnonzero(d_sorted[: group_start[j]] == prev_max[j])[0])
        reports.append(_report(ORDER_FLIP, order[k], order[j], cs, ds, n))

    # different c mapped onto the same d
    order_d = np.lexsort((cs, ds))
    dd, cc = ds[order_d], cs[order_d]
    created = np.flatnonzero((dd[1:] == dd[:-1]) & (cc[1:] != cc[:-1]))
    if len(created):
        j = created[0]
        reports.append(_report(TIE_CREATED, order_d[j], order_d[j + 1], cs, ds, n))
    return reports


def verify_ocpset_feasible(c: CoefficientVector | Sequence[int],
                           d: CoefficientVector | Sequence[int],
                           cap: int = OCPSET_CAP,
                           limit: int | None = 100) -> list[ViolationReport]:
    """Check ``d`` against every disjoint-subset constraint generated by ``c``.

    Pairs ``(S, T)`` are enumerated as ``z`` in ``{-1,0,1}^n`` with
    ``S = {z = 1}`` and ``T = {z = -1}``; only the orientation with
    ``c(S) <= c(T)`` is inspected. Bound violations (``d_i`` outside
    ``[1, max c]``) are reported with kind ``bound``. At most ``limit``
    reports are returned (``None`` for all).
    """
    c, d = as_coeffs(c), as_coeffs(d)
    if len(c) != len(d):
        raise DimensionError(f"coefficient vectors of length {len(c)} and {len(d)}")
    n = len(c)
    _check_cap(n, cap, "enumerating disjoint subset pairs")
    reports: list[ViolationReport] = []

    def full():
        return limit is not None and len(reports) >= limit

    top = max(c)
    zero = (0,) * n
    for i, di in enumerate(d):
        if not 1 <= di <= top:
            unit = tuple(int(j == i) for j in range(n))
            reports.append(ViolationReport(BOUND, unit, zero, (c[i], 0), (di, 0)))
            if full():
                return reports

    M = _exact_matrix([c, d])
    for Z in ternary_chunks(n):
        V = _dot(Z, M)
        cz, dz = V[:, 0], V[:, 1]
        nz = Z != 0
        first = np.argmax(nz, axis=1)
        canonical = Z[np.arange(len(Z)), first] == 1
        bad = ((cz < 0) & (dz >= 0)) | ((cz == 0) & (dz != 0) & canonical)
        for r in np.flatnonzero(bad):
            z = Z[r]
            x = tuple(int(v == 1) for v in z)
            y = tuple(int(v == -1) for v in z)
            cS = sum(ci for ci, xi in zip(c, x) if xi)
            cT = sum(ci for ci, yi in zip(c, y) if yi)
            dS = sum(di for di, xi in zip(d, x) if xi)
            dT = sum(di for di, yi in zip(d, y) if yi)
            if cS == cT:
                kind = TIE_BROKEN
            else:
                kind = ORDER_FLIP if dS > dT else TIE_CREATED
            reports.append(ViolationReport(kind, x, y, (cS, cT), (dS, dT)))
            if full():
                return reports
    return reports
