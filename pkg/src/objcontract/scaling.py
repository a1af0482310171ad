"""Heuristic coefficient scaling: gcd division, scale-and-round, row scaling.

These are the cheap baselines the exact contraction is compared against.
Only ``gcd_scale`` and ``row_scale`` are guaranteed to keep the efficient
set; ``scale_round`` may merge or swap subset sums, which is why its report
carries an ``exact`` flag computed by enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .core import CoefficientVector, ObjectiveMatrix, as_coeffs
from .enumeration import SIGNATURE_CAP, verify_order_preserving


@dataclass(frozen=True)
class ScaleReport:
    d: tuple[int, ...]
    lambda_description: Fraction
    exact: bool | None  # None: too long to check by enumeration

    @property
    def d_vector(self) -> CoefficientVector:
        return CoefficientVector(self.d)


def _exact_flag(c, d) -> bool | None:
    if len(c) > SIGNATURE_CAP:
        return None
    return not verify_order_preserving(c, d)


def gcd_scale(c: CoefficientVector | Sequence[int]) -> ScaleReport:
    c = as_coeffs(c)
    g = reduce(math.gcd, (abs(v) for v in c), 0)
    if g == 0:
        raise ValueError("gcd scaling of an all-zero vector is undefined")
    return ScaleReport(tuple(v // g for v in c), Fraction(1, g), True)


def ceil_scale(c: CoefficientVector | Sequence[int], factor: Fraction | int) -> ScaleReport:
    """``d_j = ceil(factor * c_j)`` for a positive rational ``factor``."""
    c = as_coeffs(c)
    factor = Fraction(factor)
    if factor <= 0:
        raise ValueError("scaling factor must be positive")
    if any(v < 0 for v in c):
        raise ValueError("scale-and-round expects non-negative coefficients")
    d = tuple(math.ceil(factor * v) for v in c)
    return ScaleReport(d, factor, _exact_flag(c, d))


def scale_round(c: CoefficientVector | Sequence[int], k: int | None = None, *,
                divisor: int | None = None) -> ScaleReport:
    """Divide by ``10**k`` (or by ``divisor``) and round up.

    Exactly one of ``k`` and ``divisor`` must be given.
    """
    if (k is None) == (divisor is None):
        raise ValueError("give exactly one of k or divisor")
    if k is not None:
        if k < 0:
            raise ValueError("k must be non-negative")
        divisor = 10 ** k
    if divisor <= 0:
        raise ValueError("divisor must be a positive integer")
    return ceil_scale(c, Fraction(1, divisor))


def row_scale(m: ObjectiveMatrix | Sequence[Sequence[int]],
              factors: Sequence[Fraction | int]) -> ObjectiveMatrix:
    rows = m.as_lists() if isinstance(m, ObjectiveMatrix) else [list(r) for r in m]
    if len(factors) != len(rows):
        raise ValueError(f"{len(factors)} factors for {len(rows)} rows")
    out = []
    for i, (row, f) in enumerate(zip(rows, factors)):
        f = Fraction(f)
        if f <= 0:
            raise ValueError(f"factor for row {i} must be positive, got {f}")
        scaled = [f * v for v in row]
        if any(v.denominator != 1 for v in scaled):
            raise ValueError(f"factor {f} leaves non-integer entries in row {i}")
        out.append([int(v) for v in scaled])
    return ObjectiveMatrix(tuple(CoefficientVector(r) for r in out))
