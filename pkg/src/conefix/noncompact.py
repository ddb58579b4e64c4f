"""Partition-budgeted diameter measure on finite sets and box unions.

alpha_k(A, p) is the least d such that A splits into at most k pieces of
p-diameter at most d. Budget 1 recovers the plain diameter and budget |A|
gives zero, so the family interpolates between the two; what the fixed point
arguments use is the strict decrease of the value under a map, and that
comparison is preserved at every budget. Instances up to ``exact_threshold``
points are solved exactly by branch and bound; larger ones fall back to a
farthest-point greedy assignment whose value is an upper bound, flagged as
heuristic in the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from .sets import BoxSet, FiniteSet
from .spaces import OrderedSpace, SeminormSpec

if TYPE_CHECKING:
    from .setmaps import MultiMap

#: Largest set size still partitioned exactly by branch and bound.
EXACT_THRESHOLD = 14


@dataclass(frozen=True)
class MeasureValue:
    """A nonnegative value per seminorm identifier."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        entries = tuple((str(n), float(v)) for n, v in self.entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate seminorm names in measure value")
        for n, v in entries:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"measure entry {n!r} must be finite and >= 0")
        object.__setattr__(self, "entries", entries)

    @staticmethod
    def from_dict(values: dict) -> "MeasureValue":
        return MeasureValue(tuple(values.items()))

    def get(self, name: str) -> float:
        for n, v in self.entries:
            if n == name:
                return v
        raise KeyError(name)

    __getitem__ = get

    def as_dict(self) -> dict:
        return dict(self.entries)

    def max_value(self) -> float:
        return max(v for _, v in self.entries)


@dataclass(frozen=True)
class AlphaResult:
    """Value of the budgeted measure plus the partition realizing it.

    ``heuristic`` is set when the greedy fallback produced the value, in
    which case it is an upper bound rather than the exact minimum.
    """

    value: float
    heuristic: bool
    parts: tuple[tuple[int, ...], ...]


def diam(s: Union[FiniteSet, BoxSet], p: SeminormSpec) -> float:
    """Exact p-diameter: pairwise maximum for point sets, vertex-pair
    maximum for box unions (p is convex, so extremes sit at vertices)."""
    pts = s.points if isinstance(s, FiniteSet) else tuple(s.vertices())
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = p(pts[i] - pts[j])
            if d > best:
                best = d
    return best


def _pairwise(points: tuple, p: SeminormSpec) -> list[list[float]]:
    n = len(points)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        pi = points[i]
        for j in range(i + 1, n):
            v = p(pi - points[j])
            d[i][j] = v
            d[j][i] = v
    return d


def _part_value(d: list[list[float]], parts) -> float:
    best = 0.0
    for part in parts:
        for a in range(len(part)):
            ia = part[a]
            for b in range(a + 1, len(part)):
                v = d[ia][part[b]]
                if v > best:
                    best = v
    return best


def _greedy_partition(d: list[list[float]], k: int):
    """Farthest-point seeding, then nearest-center assignment. Deterministic:
    ties resolve to the smallest index."""
    n = len(d)
    centers = [0]
    while len(centers) < k:
        far_i, far_d = -1, -1.0
        for i in range(n):
            v = min(d[i][c] for c in centers)
            if v > far_d:
                far_d, far_i = v, i
        if far_d <= 0.0:
            break
        centers.append(far_i)
    parts: list[list[int]] = [[] for _ in centers]
    for i in range(n):
        best_c = 0
        best_v = d[i][centers[0]]
        for c in range(1, len(centers)):
            v = d[i][centers[c]]
            if v < best_v:
                best_v, best_c = v, c
        parts[best_c].append(i)
    parts = [part for part in parts if part]
    return _part_value(d, parts), tuple(tuple(part) for part in parts)


def _exact_partition(d: list[list[float]], k: int, seed_value: float, seed_parts):
    """Branch and bound over assignments, seeded with the greedy solution.

    Points are placed in index order; a new part may only be opened as the
    next unused slot, which kills part-permutation symmetry. Branches whose
    running max-diameter reaches the incumbent are cut.
    """
    n = len(d)
    best_value = seed_value
    best_parts = [list(part) for part in seed_parts]
    parts: list[list[int]] = [[] for _ in range(k)]

    def place(i: int, used: int, cur_max: float):
        nonlocal best_value, best_parts
        if i == n:
            best_value = cur_max
            best_parts = [list(part) for part in parts[:used]]
            return
        row = d[i]
        for j in range(used):
            part = parts[j]
            inc = cur_max
            for m in part:
                v = row[m]
                if v > inc:
                    inc = v
            if inc < best_value:
                part.append(i)
                place(i + 1, used, inc)
                part.pop()
        if used < k and cur_max < best_value:
            parts[used].append(i)
            place(i + 1, used + 1, cur_max)
            parts[used].pop()

    place(0, 0, 0.0)
    return best_value, tuple(tuple(part) for part in best_parts if part)


def alpha_k(s: FiniteSet, p: SeminormSpec, k: int,
            exact_threshold: int = EXACT_THRESHOLD) -> AlphaResult:
    """Minimum over partitions of s into at most k parts of the largest
    part p-diameter."""
    if k < 1:
        raise ValueError("partition budget k must be >= 1")
    pts = s.points
    n = len(pts)
    if k >= n:
        return AlphaResult(0.0, False, tuple((i,) for i in range(n)))
    d = _pairwise(pts, p)
    if k == 1:
        value = max(max(row) for row in d)
        return AlphaResult(value, False, (tuple(range(n)),))
    g_value, g_parts = _greedy_partition(d, k)
    if n > exact_threshold:
        return AlphaResult(g_value, True, g_parts)
    value, parts = _exact_partition(d, k, g_value, g_parts)
    return AlphaResult(value, False, parts)


def alpha_product(dx: float, dy: float) -> float:
    """Measure of a product set from factor measures under the max product
    seminorm: the larger of the two."""
    if dx < 0.0 or dy < 0.0:
        raise ValueError("factor measures must be nonnegative")
    return max(dx, dy)


def alpha_values(space: OrderedSpace, s: FiniteSet, k: int,
                 exact_threshold: int = EXACT_THRESHOLD
                 ) -> tuple[MeasureValue, bool]:
    """Budgeted measure per seminorm of the space; second component flags
    whether any entry came from the greedy fallback."""
    entries = []
    heuristic = False
    for p in space.seminorms:
        res = alpha_k(s, p, k, exact_threshold)
        entries.append((p.name, res.value))
        heuristic = heuristic or res.heuristic
    return MeasureValue(tuple(entries)), heuristic


@dataclass(frozen=True)
class CondensingReport:
    """Comparison of the budgeted measure of a set against the measure of
    its image under a map. Zero-measure inputs are vacuous rather than a
    pass or a fail."""

    map_name: str
    seminorm: str
    budget: int
    strict: bool
    alpha_domain: float
    alpha_image: float
    heuristic: bool
    status: str  # "pass" | "fail" | "vacuous"
    domain_size: int
    image_size: int


def condensing_check(m: "MultiMap", s: FiniteSet, p: SeminormSpec, k: int,
                     strict: bool = True,
                     exact_threshold: int = EXACT_THRESHOLD) -> CondensingReport:
    """Does the map shrink the budgeted measure of s (strictly, or weakly
    when ``strict`` is off)? Box-valued images are discretized to vertices
    plus centroids first."""
    image = m.image_of_set(s)
    a_dom = alpha_k(s, p, k, exact_threshold)
    a_img = alpha_k(image, p, k, exact_threshold)
    if a_dom.value <= 0.0:
        status = "vacuous"
    elif (a_img.value < a_dom.value) if strict else (a_img.value <= a_dom.value):
        status = "pass"
    else:
        status = "fail"
    return CondensingReport(
        map_name=m.name,
        seminorm=p.name,
        budget=k,
        strict=strict,
        alpha_domain=a_dom.value,
        alpha_image=a_img.value,
        heuristic=a_dom.heuristic or a_img.heuristic,
        status=status,
        domain_size=len(s),
        image_size=len(image),
    )


__all__ = [
    "EXACT_THRESHOLD", "MeasureValue", "AlphaResult", "diam", "alpha_k",
    "alpha_product", "alpha_values", "CondensingReport", "condensing_check",
]
