"""Computable set representations: finite point clouds and box unions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .errors import DimensionMismatch, EmptySetError
from .spaces import Point


@dataclass(frozen=True)
class FiniteSet:
    """A nonempty finite set of points of equal dimension. Duplicates are
    removed on construction, keeping first occurrences in order."""

    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise EmptySetError("a finite set needs at least one point")
        dim = len(pts[0])
        seen: dict[tuple[float, ...], None] = {}
        for pt in pts:
            if len(pt) != dim:
                raise DimensionMismatch("all points must share one dimension")
            seen.setdefault(pt.coords, None)
        object.__setattr__(self, "points",
                           tuple(Point(c) for c in seen.keys()))

    @staticmethod
    def of(values: Iterable) -> "FiniteSet":
        pts = tuple(v if isinstance(v, Point) else Point.of(v) for v in values)
        return FiniteSet(pts)

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, pt: Point) -> bool:
        return any(pt.coords == q.coords for q in self.points)

    def contains_near(self, pt: Point, tol: float) -> bool:
        return any(all(abs(a - b) <= tol for a, b in zip(pt.coords, q.coords))
                   for q in self.points)

    def union(self, *others: "FiniteSet") -> "FiniteSet":
        pts = list(self.points)
        for s in others:
            pts.extend(s.points)
        return FiniteSet(tuple(pts))

    def lex_min(self) -> Point:
        return min(self.points, key=lambda q: q.coords)


def union_finite(sets: Iterable[FiniteSet]) -> FiniteSet:
    pts: list[Point] = []
    for s in sets:
        pts.extend(s.points)
    return FiniteSet(tuple(pts))


@dataclass(frozen=True)
class BoxSet:
    """A finite union of axis-aligned boxes, each given by lo <= hi
    componentwise. Boxes may overlap."""

    boxes: tuple[tuple[Point, Point], ...]

    def __post_init__(self):
        boxes = tuple((lo, hi) for lo, hi in self.boxes)
        if not boxes:
            raise EmptySetError("a box set needs at least one box")
        dim = len(boxes[0][0])
        for lo, hi in boxes:
            if len(lo) != dim or len(hi) != dim:
                raise DimensionMismatch("all boxes must share one dimension")
            if any(a > b for a, b in zip(lo.coords, hi.coords)):
                raise ValueError(f"empty box: lo {lo.coords} above hi {hi.coords}")
        object.__setattr__(self, "boxes", boxes)

    @staticmethod
    def of(pairs: Iterable) -> "BoxSet":
        boxes = []
        for lo, hi in pairs:
            lo = lo if isinstance(lo, Point) else Point.of(lo)
            hi = hi if isinstance(hi, Point) else Point.of(hi)
            boxes.append((lo, hi))
        return BoxSet(tuple(boxes))

    @property
    def dimension(self) -> int:
        return len(self.boxes[0][0])

    def contains(self, z: Point, tol: float = 0.0) -> bool:
        if len(z) != self.dimension:
            raise DimensionMismatch("point dimension does not match boxes")
        return any(all(a - tol <= c <= b + tol
                       for a, b, c in zip(lo.coords, hi.coords, z.coords))
                   for lo, hi in self.boxes)

    def vertices(self) -> list[Point]:
        out = []
        for lo, hi in self.boxes:
            axes = [(a,) if a == b else (a, b)
                    for a, b in zip(lo.coords, hi.coords)]
            for combo in product(*axes):
                out.append(Point(combo))
        return out

    def centroids(self) -> list[Point]:
        return [Point(tuple(0.5 * (a + b) for a, b in zip(lo.coords, hi.coords)))
                for lo, hi in self.boxes]

    def to_finite(self, include_centroids: bool = True) -> FiniteSet:
        """Discretize to box vertices (where diameters of boxes are attained
        for the supported seminorm kinds) plus, optionally, box centroids."""
        pts = self.vertices()
        if include_centroids:
            pts.extend(self.centroids())
        return FiniteSet(tuple(pts))
