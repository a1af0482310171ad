"""Data model for multi-objective binary instances and the dominance vocabulary.

Everything here works on plain Python integers (and ``Fraction`` where a ratio
is needed) so that large objective coefficients never lose precision.
Points are tuples of ints; minimization is assumed throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[int, ...]

ALL_POSITIVE = "all-positive"
MIXED = "mixed"
CONTAINS_ZERO = "contains-zero"

SENSES = ("le", "eq", "ge")


class DimensionError(ValueError):
    """Raised when vectors that must agree in length do not."""


def _as_int_tuple(values: Iterable[int]) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise TypeError(f"expected an integer coefficient, got {v!r}")
        out.append(int(v))
    return tuple(out)


def sign_class_of(coeffs: Sequence[int]) -> str:
    if any(v < 0 for v in coeffs):
        return MIXED
    if any(v == 0 for v in coeffs):
        return CONTAINS_ZERO
    return ALL_POSITIVE


@dataclass(frozen=True)
class CoefficientVector:
    """Integer coefficients of one linear objective."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_int_tuple(self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("a coefficient vector needs at least one entry")

    @property
    def sign_class(self) -> str:
        return sign_class_of(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]


def as_coeffs(c: CoefficientVector | Sequence[int]) -> tuple[int, ...]:
    """Accept either a CoefficientVector or a bare integer sequence."""
    if isinstance(c, CoefficientVector):
        return c.coeffs
    return _as_int_tuple(c)


@dataclass(frozen=True)
class ObjectiveMatrix:
    rows: tuple[CoefficientVector, ...]

    def __post_init__(self):
        rows = tuple(r if isinstance(r, CoefficientVector) else CoefficientVector(r)
                     for r in self.rows)
        if not rows:
            raise ValueError("an objective matrix needs at least one row")
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise DimensionError(f"objective row {i} has length {len(r)}, expected {width}")
        object.__setattr__(self, "rows", rows)

    @property
    def nobjs(self) -> int:
        return len(self.rows)

    @property
    def nvars(self) -> int:
        return len(self.rows[0])

    def as_lists(self) -> list[list[int]]:
        return [list(r.coeffs) for r in self.rows]


@dataclass(frozen=True)
class LinearConstraint:
    """``coeffs . x  <sense>  rhs`` with sense one of ``le``, ``eq``, ``ge``."""

    coeffs: tuple[int, ...]
    sense: str
    rhs: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_int_tuple(self.coeffs))
        if self.sense not in SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        object.__setattr__(self, "rhs", _as_int_tuple([self.rhs])[0])

    def satisfied_by(self, x: Sequence[int]) -> bool:
        lhs = sum(a * xi for a, xi in zip(self.coeffs, x))
        if self.sense == "le":
            return lhs <= self.rhs
        if self.sense == "ge":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class Instance:
    """A multi-objective binary program ``min Cx`` over ``x`` in ``X``.

    An empty constraint list means ``X`` is the full hypercube.
    """

    objectives: ObjectiveMatrix
    constraints: tuple[LinearConstraint, ...] = ()
    name: str = "instance"

    def __post_init__(self):
        obj = self.objectives
        if not isinstance(obj, ObjectiveMatrix):
            obj = ObjectiveMatrix(tuple(obj))
            object.__setattr__(self, "objectives", obj)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for k, con in enumerate(self.constraints):
            if len(con.coeffs) != obj.nvars:
                raise DimensionError(
                    f"constraint {k} has {len(con.coeffs)} coefficients, expected {obj.nvars}")

    @classmethod
    def from_lists(cls, objectives, constraints=(), name="instance") -> "Instance":
        cons = tuple(c if isinstance(c, LinearConstraint) else LinearConstraint(*c)
                     for c in constraints)
        return cls(ObjectiveMatrix(tuple(CoefficientVector(r) for r in objectives)), cons, name)

    @property
    def nvars(self) -> int:
        return self.objectives.nvars

    @property
    def nobjs(self) -> int:
        return self.objectives.nobjs

    def evaluate(self, x: Sequence[int]) -> Point:
        return tuple(sum(c * xi for c, xi in zip(row.coeffs, x)) for row in self.objectives.rows)

    def is_feasible(self, x: Sequence[int]) -> bool:
        return all(con.satisfied_by(x) for con in self.constraints)

    def with_objectives(self, rows: Sequence[Sequence[int]]) -> "Instance":
        return Instance(ObjectiveMatrix(tuple(CoefficientVector(r) for r in rows)),
                        self.constraints, self.name)


@dataclass
class ParetoSet:
    """Non-dominated points, each with every efficient solution mapping onto it."""

    entries: dict[Point, list[tuple[int, ...]]] = field(default_factory=dict)

    @property
    def points(self) -> set[Point]:
        return set(self.entries)

    @property
    def solutions(self) -> set[tuple[int, ...]]:
        return {x for xs in self.entries.values() for x in xs}

    def __len__(self) -> int:
        return len(self.entries)


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff ``a`` dominates ``b`` (minimization)."""
    if len(a) != len(b):
        raise DimensionError(f"points of length {len(a)} and {len(b)} are not comparable")
    strict = False
    for ai, bi in zip(a, b):
        if ai > bi:
            return False
        if ai < bi:
            strict = True
    return strict


def nondominated_filter(points: Iterable[Sequence[int]]) -> set[Point]:
    """Return the points not dominated by any other input point."""
    pts = sorted({tuple(p) for p in points})
    if not pts:
        return set()
    p = len(pts[0])
    if any(len(q) != p for q in pts):
        raise DimensionError("points have mixed lengths")
    # A dominator is lexicographically smaller, so a single sorted sweep suffices.
    front: list[Point] = []
    for q in pts:
        if not any(dominates(f, q) for f in front):
            front.append(q)
    return set(front)


def ideal_point(points: Iterable[Sequence[int]]) -> Point:
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("the ideal point of an empty set is undefined")
    p = len(pts[0])
    if any(len(q) != p for q in pts):
        raise DimensionError("points have mixed lengths")
    return tuple(min(q[i] for q in pts) for i in range(p))


def hypervolume(points: Iterable[Sequence[int]], ref: Sequence[int]) -> Fraction:
    """Exact measure of the union of boxes ``[ref, s]`` over points ``s`` dominated by ``ref``.

    Recursive dimension sweep: slice on the last coordinate and recurse on the
    remaining ones. Coordinates may be ints or Fractions.
    """
    ref = tuple(ref)
    pts = []
    for s in points:
        s = tuple(s)
        if len(s) != len(ref):
            raise DimensionError("point and reference point differ in length")
        if dominates(ref, s):
            pts.append(s)
    if not pts:
        return Fraction(0)
    return Fraction(_hv_sweep(nondominated_filter_max(pts), ref))


def nondominated_filter_max(points: list[Point]) -> list[Point]:
    """Keep points whose box is not contained in another point's box."""
    uniq = sorted(set(points), reverse=True)
    keep: list[Point] = []
    for q in uniq:
        if not any(all(k >= qi for k, qi in zip(kp, q)) for kp in keep):
            keep.append(q)
    return keep


def _hv_sweep(pts: list[Point], ref: Point):
    dim = len(ref)
    if dim == 1:
        return max(s[0] for s in pts) - ref[0]
    levels = sorted({s[-1] for s in pts}, reverse=True)
    total = 0
    for k, level in enumerate(levels):
        below = levels[k + 1] if k + 1 < len(levels) else ref[-1]
        height = level - below
        if height <= 0:
            continue
        active = [s[:-1] for s in pts if s[-1] >= level]
        sub_ref = ref[:-1]
        sub = [s for s in active if all(si > ri for si, ri in zip(s, sub_ref))]
        if sub:
            total += height * _hv_sweep(nondominated_filter_max(sub), sub_ref)
    return total


def contraction_factor(c: CoefficientVector | Sequence[int],
                       d: CoefficientVector | Sequence[int]) -> Fraction:
    """Relative reduction of the coefficient sum, ``(sum c - sum d) / sum c``."""
    c, d = as_coeffs(c), as_coeffs(d)
    if len(c) != len(d):
        raise DimensionError(f"coefficient vectors of length {len(c)} and {len(d)}")
    if any(v < 0 for v in c) or any(v < 0 for v in d):
        raise ValueError("the contraction factor is defined for non-negative coefficients")
    total = sum(c)
    if total == 0:
        raise ZeroDivisionError("contraction factor of an all-zero vector")
    return Fraction(total - sum(d), total)
