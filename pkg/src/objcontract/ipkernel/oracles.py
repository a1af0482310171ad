"""Exact separation oracles over ``z in {-1, 0, 1}^n``.

Both problems are solved by meet-in-the-middle: the index set is split in
two halves, all ``3^(n/2)`` signed partial sums of each half are listed, and
the halves are joined by a sorted sweep (oracle A) or a hash join on the
``d`` side (oracle B).

Ties are broken the same way everywhere so that cut sequences are
reproducible: oracle A prefers larger ``d.z``, then smaller ``c.z``, then the
lexicographically smallest ``z``; oracle B prefers smaller ``c.z`` and then
the lexicographically smallest ``z``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import DimensionError, as_coeffs

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class OracleSolution:
    z: tuple[int, ...]
    dsum: int
    csum: int

    @property
    def S(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.z) if v == 1)

    @property
    def T(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.z) if v == -1)

    def consistent_with(self, c: Sequence[int], d: Sequence[int]) -> bool:
        return (self.dsum == sum(di * zi for di, zi in zip(d, self.z))
                and self.csum == sum(ci * zi for ci, zi in zip(c, self.z)))


def _half(values_c, values_d):
    """All signed partial sums of one half, in lexicographic order of the sign vector."""
    k = len(values_c)
    total = 3 ** k
    codes = np.arange(total, dtype=np.int64)
    Z = np.empty((total, k), dtype=np.int64)
    rest = codes
    for i in range(k - 1, -1, -1):
        Z[:, i] = rest % 3 - 1
        rest = rest // 3
    cs = Z @ np.asarray(values_c, dtype=np.int64) if k else np.zeros(1, dtype=np.int64)
    ds = Z @ np.asarray(values_d, dtype=np.int64) if k else np.zeros(1, dtype=np.int64)
    return cs, ds, codes


def _decode(code: int, k: int) -> tuple[int, ...]:
    digits = []
    for _ in range(k):
        code, r = divmod(code, 3)
        digits.append(r - 1)
    return tuple(reversed(digits))


def _split(c, d):
    c, d = as_coeffs(c), as_coeffs(d)
    if len(c) != len(d):
        raise DimensionError(f"coefficient vectors of length {len(c)} and {len(d)}")
    h = len(c) // 2
    return c, d, h


def _fits_int64(c, d) -> bool:
    return sum(abs(v) for v in c) < _INT64_SAFE and sum(abs(v) for v in d) < _INT64_SAFE


def oracle_a(c, d) -> OracleSolution:
    """``max d.z`` subject to ``c.z <= 0``; ``z = 0`` is always feasible."""
    c, d, h = _split(c, d)
    if not _fits_int64(c, d):
        return _oracle_a_python(c, d, h)
    cA, dA, codeA = _half(c[:h], d[:h])
    cB, dB, codeB = _half(c[h:], d[h:])

    by_c = np.argsort(cB, kind="stable")
    # rank of each B element under (-dB, cB, codeB)
    pref = np.lexsort((codeB, cB, -dB))
    rank = np.empty_like(pref)
    rank[pref] = np.arange(len(pref))
    best_rank = np.minimum.accumulate(rank[by_c])

    pos = np.searchsorted(cB[by_c], -cA, side="right")
    ok = pos > 0
    a_idx = np.flatnonzero(ok)
    b_idx = pref[best_rank[pos[ok] - 1]]
    delta = dA[a_idx] + dB[b_idx]
    kappa = cA[a_idx] + cB[b_idx]
    win = np.lexsort((codeB[b_idx], codeA[a_idx], kappa, -delta))[0]
    ia, ib = a_idx[win], b_idx[win]
    z = _decode(int(codeA[ia]), h) + _decode(int(codeB[ib]), len(c) - h)
    return OracleSolution(z, int(delta[win]), int(kappa[win]))


def oracle_b(c, d) -> OracleSolution:
    """``min c.z`` subject to ``d.z = 0``; ``z = 0`` is always feasible."""
    c, d, h = _split(c, d)
    if not _fits_int64(c, d):
        return _oracle_b_python(c, d, h)
    cA, dA, codeA = _half(c[:h], d[:h])
    cB, dB, codeB = _half(c[h:], d[h:])

    order = np.lexsort((codeB, cB, dB))
    keys = dB[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = keys[1:] != keys[:-1]
    heads = order[first]
    head_d = dB[heads]

    pos = np.searchsorted(head_d, -dA)
    pos_c = np.minimum(pos, len(head_d) - 1)
    ok = head_d[pos_c] == -dA
    a_idx = np.flatnonzero(ok)
    b_idx = heads[pos_c[ok]]
    kappa = cA[a_idx] + cB[b_idx]
    win = np.lexsort((codeB[b_idx], codeA[a_idx], kappa))[0]
    ia, ib = a_idx[win], b_idx[win]
    z = _decode(int(codeA[ia]), h) + _decode(int(codeB[ib]), len(c) - h)
    return OracleSolution(z, int(dA[ia] + dB[ib]), int(kappa[win]))


# Arbitrary-precision fallbacks for coefficients whose sums overflow int64.


def _half_python(cs, ds):
    items = [((), 0, 0)]
    for ci, di in zip(cs, ds):
        items = [(z + (v,), sc + v * ci, sd + v * di) for z, sc, sd in items for v in (-1, 0, 1)]
    return items


def _oracle_a_python(c, d, h) -> OracleSolution:
    A = _half_python(c[:h], d[:h])
    B = sorted(_half_python(c[h:], d[h:]), key=lambda t: t[1])
    best = []
    cur = None
    for zb, cb, db in B:
        key = (-db, cb, zb)
        if cur is None or key < cur:
            cur = key
        best.append(cur)
    cvals = [t[1] for t in B]
    winner = None
    for za, ca, da in A:
        pos = bisect.bisect_right(cvals, -ca)
        if pos == 0:
            continue
        ndb, cb, zb = best[pos - 1]
        key = (-(da - ndb), ca + cb, za, zb)
        if winner is None or key < winner:
            winner = key
    nd, kappa, za, zb = winner
    return OracleSolution(za + zb, -nd, kappa)


def _oracle_b_python(c, d, h) -> OracleSolution:
    A = _half_python(c[:h], d[:h])
    table: dict[int, tuple[int, tuple[int, ...]]] = {}
    for zb, cb, db in _half_python(c[h:], d[h:]):
        if db not in table or (cb, zb) < table[db]:
            table[db] = (cb, zb)
    winner = None
    for za, ca, da in A:
        hit = table.get(-da)
        if hit is None:
            continue
        key = (ca + hit[0], za, hit[1])
        if winner is None or key < winner:
            winner = key
    kappa, za, zb = winner
    return OracleSolution(za + zb, 0, kappa)
