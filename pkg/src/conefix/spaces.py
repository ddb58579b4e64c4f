"""Cone-ordered finite-dimensional vector spaces.

Points, polyhedral cones, seminorm families and order intervals. A cone K
induces the partial order x <= y iff y - x lies in K. All membership and
order tests absorb floating-point noise through a small absolute tolerance
on the evaluated functionals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyIntervalError

#: Absolute slack applied to cone membership and order comparisons.
ORDER_TOL = 1e-12

ORTHANT = "orthant"
INEQUALITIES = "polyhedral-inequalities"

WEIGHTED_SUP = "weighted-sup"
FUNCTIONAL_MAX = "functional-max"


@dataclass(frozen=True)
class Point:
    """Immutable coordinate vector with finite entries."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        for c in coords:
            if not math.isfinite(c):
                raise ValueError(f"non-finite coordinate {c!r}")
        object.__setattr__(self, "coords", coords)

    @staticmethod
    def of(values) -> "Point":
        return Point(tuple(values))

    @staticmethod
    def zero(dim: int) -> "Point":
        return Point((0.0,) * dim)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def __add__(self, other: "Point") -> "Point":
        _same_dim(self, other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        _same_dim(self, other)
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, factor: float) -> "Point":
        return Point(tuple(factor * a for a in self.coords))


def _same_dim(x: Point, y: Point) -> None:
    if len(x) != len(y):
        raise DimensionMismatch(f"points of dimension {len(x)} and {len(y)}")


@dataclass(frozen=True)
class ConeSpec:
    """A closed convex cone, either the nonnegative orthant or the solution
    set of finitely many linear inequalities G x >= 0 (componentwise).

    Pointedness (K intersected with -K equals {0}) is a checkable property,
    not a construction invariant: membership queries are well defined for
    any inequality system, and a genuine partial order is only required when
    the cone is attached to an :class:`OrderedSpace`.
    """

    kind: str
    rows: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.kind == ORTHANT:
            if self.rows is not None:
                raise ValueError("orthant cone takes no inequality rows")
        elif self.kind == INEQUALITIES:
            if not self.rows:
                raise ValueError("inequality cone needs at least one row")
            rows = tuple(tuple(float(v) for v in row) for row in self.rows)
            width = len(rows[0])
            for row in rows:
                if len(row) != width:
                    raise ValueError("inequality rows must have equal length")
                if not all(math.isfinite(v) for v in row):
                    raise ValueError("inequality rows must be finite")
            object.__setattr__(self, "rows", rows)
        else:
            raise ValueError(f"unknown cone kind {self.kind!r}")

    @staticmethod
    def orthant() -> "ConeSpec":
        return ConeSpec(ORTHANT)

    @staticmethod
    def inequalities(rows) -> "ConeSpec":
        return ConeSpec(INEQUALITIES, tuple(tuple(row) for row in rows))

    def row_dimension(self) -> int | None:
        """Dimension fixed by the inequality rows, None for the orthant."""
        return None if self.rows is None else len(self.rows[0])

    def is_pointed(self, dim: int) -> bool:
        """True iff K meets -K only in the origin.

        For an inequality cone this holds exactly when the rows span the
        whole space, so a rank computation decides it.
        """
        if self.kind == ORTHANT:
            return True
        if len(self.rows[0]) != dim:
            raise DimensionMismatch(
                f"cone rows have length {len(self.rows[0])}, expected {dim}")
        return int(np.linalg.matrix_rank(np.asarray(self.rows, dtype=float))) == dim

    def contains(self, x: Point, tol: float = ORDER_TOL) -> bool:
        if self.kind == ORTHANT:
            return all(c >= -tol for c in x.coords)
        if len(self.rows[0]) != len(x):
            raise DimensionMismatch(
                f"cone rows have length {len(self.rows[0])}, point has {len(x)}")
        for row in self.rows:
            if sum(r * c for r, c in zip(row, x.coords)) < -tol:
                return False
        return True


def cone_contains(cone: ConeSpec, x: Point, tol: float = ORDER_TOL) -> bool:
    """Cone membership of x, with absolute slack tol on every functional."""
    return cone.contains(x, tol)


@dataclass(frozen=True)
class SeminormSpec:
    """A seminorm given either by per-coordinate weights,
    p(x) = max_i w_i |x_i|, or by linear functionals, p(x) = max_j |<a_j, x>|.
    Both are convex and piecewise linear, so maxima over boxes sit at box
    vertices.
    """

    name: str
    kind: str
    weights: tuple[float, ...] | None = None
    rows: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("seminorm needs a nonempty name")
        if self.kind == WEIGHTED_SUP:
            if self.weights is None or self.rows is not None:
                raise ValueError("weighted-sup seminorm takes weights only")
            weights = tuple(float(w) for w in self.weights)
            if not weights:
                raise ValueError("weight vector must be nonempty")
            if any(not math.isfinite(w) or w < 0.0 for w in weights):
                raise ValueError("weights must be finite and nonnegative")
            object.__setattr__(self, "weights", weights)
        elif self.kind == FUNCTIONAL_MAX:
            if self.rows is None or self.weights is not None:
                raise ValueError("functional-max seminorm takes rows only")
            rows = tuple(tuple(float(v) for v in row) for row in self.rows)
            if not rows:
                raise ValueError("functional rows must be nonempty")
            width = len(rows[0])
            for row in rows:
                if len(row) != width:
                    raise ValueError("functional rows must have equal length")
                if not all(math.isfinite(v) for v in row):
                    raise ValueError("functional rows must be finite")
            object.__setattr__(self, "rows", rows)
        else:
            raise ValueError(f"unknown seminorm kind {self.kind!r}")

    @staticmethod
    def sup(dim: int, name: str = "sup") -> "SeminormSpec":
        """The plain sup norm: unit weights on every coordinate."""
        return SeminormSpec(name, WEIGHTED_SUP, weights=(1.0,) * dim)

    @staticmethod
    def weighted(weights, name: str) -> "SeminormSpec":
        return SeminormSpec(name, WEIGHTED_SUP, weights=tuple(weights))

    @staticmethod
    def functional(rows, name: str) -> "SeminormSpec":
        return SeminormSpec(name, FUNCTIONAL_MAX,
                            rows=tuple(tuple(row) for row in rows))

    @property
    def dimension(self) -> int:
        if self.kind == WEIGHTED_SUP:
            return len(self.weights)
        return len(self.rows[0])

    def __call__(self, x: Point) -> float:
        if len(x) != self.dimension:
            raise DimensionMismatch(
                f"seminorm {self.name!r} has dimension {self.dimension}, "
                f"point has {len(x)}")
        if self.kind == WEIGHTED_SUP:
            return max(w * abs(c) for w, c in zip(self.weights, x.coords))
        return max(abs(sum(r * c for r, c in zip(row, x.coords)))
                   for row in self.rows)

    def functional_rows(self) -> tuple[tuple[float, ...], ...]:
        """Rows a_j realizing p(x) = max_j |<a_j, x>|; may be empty when the
        seminorm is identically zero."""
        if self.kind == FUNCTIONAL_MAX:
            return self.rows
        d = len(self.weights)
        rows = []
        for i, w in enumerate(self.weights):
            if w > 0.0:
                row = [0.0] * d
                row[i] = w
                rows.append(tuple(row))
        return tuple(rows)


@dataclass(frozen=True)
class OrderedSpace:
    """A finite-dimensional space with a pointed cone order and a finite
    separating family of seminorms."""

    dimension: int
    cone: ConeSpec
    seminorms: tuple[SeminormSpec, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "seminorms", tuple(self.seminorms))
        if not self.seminorms:
            raise ValueError("space needs at least one seminorm")
        names = [p.name for p in self.seminorms]
        if len(set(names)) != len(names):
            raise ValueError(f"seminorm names must be unique, got {names}")
        for p in self.seminorms:
            if p.dimension != self.dimension:
                raise DimensionMismatch(
                    f"seminorm {p.name!r} has dimension {p.dimension}, "
                    f"space has {self.dimension}")
        row_dim = self.cone.row_dimension()
        if row_dim is not None and row_dim != self.dimension:
            raise DimensionMismatch(
                f"cone rows have length {row_dim}, space has {self.dimension}")
        if not self.cone.is_pointed(self.dimension):
            raise ValueError("cone is not pointed, order would not be antisymmetric")
        # The family separates points iff the union of its functional rows
        # spans the space; a rank check decides that exactly for both kinds.
        stacked = [row for p in self.seminorms for row in p.functional_rows()]
        if not stacked or int(np.linalg.matrix_rank(
                np.asarray(stacked, dtype=float))) != self.dimension:
            raise ValueError("seminorm family does not separate points")

    @staticmethod
    def orthant(dim: int, seminorms: tuple[SeminormSpec, ...] | None = None
                ) -> "OrderedSpace":
        if seminorms is None:
            seminorms = (SeminormSpec.sup(dim),)
        return OrderedSpace(dim, ConeSpec.orthant(), seminorms)

    def leq(self, x: Point, y: Point, tol: float = ORDER_TOL) -> bool:
        _same_dim(x, y)
        if len(x) != self.dimension:
            raise DimensionMismatch(
                f"points of dimension {len(x)} in a space of dimension "
                f"{self.dimension}")
        return self.cone.contains(y - x, tol)

    def max_seminorm(self, x: Point) -> float:
        return max(p(x) for p in self.seminorms)

    def seminorm_named(self, name: str) -> SeminormSpec:
        for p in self.seminorms:
            if p.name == name:
                return p
        raise KeyError(f"no seminorm named {name!r}")


def leq(space: OrderedSpace, x: Point, y: Point, tol: float = ORDER_TOL) -> bool:
    """x <= y in the cone order of the space."""
    return space.leq(x, y, tol)


@dataclass(frozen=True)
class OrderInterval:
    """The order interval [lo, hi] = {z : lo <= z <= hi}. The interval is
    empty (and flagged so) when lo is not below hi."""

    space: OrderedSpace
    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != self.space.dimension or len(self.hi) != self.space.dimension:
            raise DimensionMismatch("interval endpoints must match the space dimension")

    @property
    def is_empty(self) -> bool:
        return not self.space.leq(self.lo, self.hi)

    def contains(self, z: Point, tol: float = ORDER_TOL) -> bool:
        if self.is_empty:
            return False
        return self.space.leq(self.lo, z, tol) and self.space.leq(z, self.hi, tol)


def interval_contains(interval: OrderInterval, z: Point,
                      tol: float = ORDER_TOL) -> bool:
    """Membership in an order interval; always False for empty intervals."""
    return interval.contains(z, tol)


def _box_seminorm_max(lo: Point, hi: Point, p: SeminormSpec) -> float:
    """Exact maximum of p over the axis-aligned box [lo, hi]."""
    if p.kind == WEIGHTED_SUP:
        return max(w * max(abs(a), abs(b))
                   for w, a, b in zip(p.weights, lo.coords, hi.coords))
    best = 0.0
    for row in p.rows:
        top = sum(r * (b if r >= 0.0 else a)
                  for r, a, b in zip(row, lo.coords, hi.coords))
        bot = sum(r * (a if r >= 0.0 else b)
                  for r, a, b in zip(row, lo.coords, hi.coords))
        best = max(best, abs(top), abs(bot))
    return best


def _polytope_linear_range(rows_ub: np.ndarray, rhs_ub: np.ndarray,
                           objective: np.ndarray) -> tuple[float, float]:
    """Exact (min, max) of a linear functional over {z : rows_ub z <= rhs_ub}."""
    from scipy.optimize import linprog

    out = []
    for sign in (1.0, -1.0):
        res = linprog(sign * objective, A_ub=rows_ub, b_ub=rhs_ub,
                      bounds=[(None, None)] * rows_ub.shape[1], method="highs")
        if not res.success:
            raise RuntimeError(
                f"linear program over the order interval failed: {res.message}")
        out.append(sign * res.fun)
    return out[0], out[1]


def interval_bound(space: OrderedSpace, interval: OrderInterval,
                   p: SeminormSpec) -> float:
    """A finite bound B with p(z) <= B on the whole interval.

    For the orthant cone the interval is the box [lo, hi] and B is the exact
    maximum, attained at a box vertex. For inequality cones the interval is a
    polytope and B is computed exactly with one linear program per functional
    (or per coordinate for weighted-sup seminorms).
    """
    if interval.is_empty:
        raise EmptyIntervalError("cannot bound a seminorm over an empty interval")
    if space.cone.kind == ORTHANT:
        return _box_seminorm_max(interval.lo, interval.hi, p)
    g = np.asarray(space.cone.rows, dtype=float)
    lo = np.asarray(interval.lo.coords, dtype=float)
    hi = np.asarray(interval.hi.coords, dtype=float)
    rows_ub = np.vstack([-g, g])
    rhs_ub = np.concatenate([-g @ lo, g @ hi])
    best = 0.0
    if p.kind == WEIGHTED_SUP:
        d = space.dimension
        for i, w in enumerate(p.weights):
            if w <= 0.0:
                continue
            e = np.zeros(d)
            e[i] = 1.0
            zmin, zmax = _polytope_linear_range(rows_ub, rhs_ub, e)
            best = max(best, w * max(abs(zmin), abs(zmax)))
        return best
    for row in p.rows:
        zmin, zmax = _polytope_linear_range(rows_ub, rhs_ub,
                                            np.asarray(row, dtype=float))
        best = max(best, abs(zmin), abs(zmax))
    return best


@dataclass(frozen=True)
class SandwichViolation:
    index: int
    reason: str  # "not-nonnegative" | "not-dominated"


@dataclass(frozen=True)
class SandwichReport:
    """Outcome of the empirical sandwich test: if the dominating sequence
    decays to zero in p, the dominated one should too. A diagnostic of cone
    normality, not a proof."""

    violations: tuple[SandwichViolation, ...]
    xs_tail_max: float
    ys_tail_max: float
    xs_converged: bool
    ys_converged: bool
    passed: bool


def _tail_converged(values: list[float], abs_tol: float, decay_ratio: float) -> tuple[float, bool]:
    tail = values[-max(1, len(values) // 4):]
    tail_max = max(tail)
    overall = max(values)
    return tail_max, tail_max <= abs_tol or tail_max <= decay_ratio * overall


def sandwich_check(space: OrderedSpace, xs, ys, p: SeminormSpec,
                   abs_tol: float = 1e-9,
                   decay_ratio: float = 0.1) -> SandwichReport:
    """Tail-max comparison of p along two sequences with 0 <= xs[i] <= ys[i].

    Order violations are reported, not raised. The check passes when the
    ys values have empirically decayed (tail max under abs_tol, or under
    decay_ratio times the overall max) only if the xs values have decayed
    too; a non-decaying ys makes the test vacuous.
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise ValueError("sequences must have the same length")
    if not xs:
        raise ValueError("sequences must be nonempty")
    zero = Point.zero(space.dimension)
    violations = []
    for i, (x, y) in enumerate(zip(xs, ys)):
        if not space.leq(zero, x):
            violations.append(SandwichViolation(i, "not-nonnegative"))
        elif not space.leq(x, y):
            violations.append(SandwichViolation(i, "not-dominated"))
    px = [p(x) for x in xs]
    py = [p(y) for y in ys]
    xs_tail, xs_conv = _tail_converged(px, abs_tol, decay_ratio)
    ys_tail, ys_conv = _tail_converged(py, abs_tol, decay_ratio)
    return SandwichReport(
        violations=tuple(violations),
        xs_tail_max=xs_tail,
        ys_tail_max=ys_tail,
        xs_converged=xs_conv,
        ys_converged=ys_conv,
        passed=xs_conv or not ys_conv,
    )
