"""Multivalued maps and order-theoretic checks on them.

Two set orders are implemented: the all-pairs order (every element of A
below every element of B) and the Dhage order (every element of A below
some element of B, every element of B above some element of A). The
all-pairs order implies the Dhage order, never the converse.

Isotonicity over a continuum domain is undecidable, so every check here is
sampled: the caller supplies a finite set of probe points and the verdict
quantifies over those only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .errors import CodomainViolation, DomainError, EvaluationError
from .sets import BoxSet, FiniteSet, union_finite
from .spaces import (ORDER_TOL, ConeSpec, OrderInterval, OrderedSpace, Point)

DomainLike = Union[OrderInterval, BoxSet, ConeSpec, FiniteSet, None]


def _domain_contains(domain: DomainLike, x: Point, tol: float) -> bool:
    if domain is None:
        return True
    if isinstance(domain, OrderInterval):
        return domain.contains(x, tol)
    if isinstance(domain, BoxSet):
        return domain.contains(x, tol)
    if isinstance(domain, ConeSpec):
        return domain.contains(x, tol)
    if isinstance(domain, FiniteSet):
        return domain.contains_near(x, tol)
    raise TypeError(f"unsupported domain descriptor {type(domain).__name__}")


@dataclass(frozen=True)
class MultiMap:
    """A map from points to nonempty finite sets or box unions.

    The domain descriptor doubles as the codomain: evaluations are checked
    to land inside it, and a violation is an error, not a report entry.
    Evaluators must be pure (same input, same output).
    """

    name: str
    evaluator: Callable[[Point], Union[FiniteSet, BoxSet]]
    domain: DomainLike = None
    membership_tol: float = ORDER_TOL

    def contains(self, x: Point) -> bool:
        return _domain_contains(self.domain, x, self.membership_tol)

    def evaluate(self, x: Point) -> Union[FiniteSet, BoxSet]:
        if not self.contains(x):
            raise DomainError(f"{x.coords} is outside the domain of {self.name!r}")
        value = self.evaluator(x)
        if not isinstance(value, (FiniteSet, BoxSet)):
            raise EvaluationError(
                f"evaluator of {self.name!r} returned {type(value).__name__}, "
                "expected FiniteSet or BoxSet")
        if self.domain is not None:
            probes = value.points if isinstance(value, FiniteSet) else value.vertices()
            for q in probes:
                if not _domain_contains(self.domain, q, self.membership_tol):
                    raise CodomainViolation(
                        f"{self.name!r} produced {q.coords} outside its codomain")
        return value

    def evaluate_finite(self, x: Point) -> FiniteSet:
        """Evaluate and discretize box values to vertices plus centroids."""
        value = self.evaluate(x)
        return value if isinstance(value, FiniteSet) else value.to_finite()

    def evaluate_single(self, x: Point) -> Point:
        value = self.evaluate_finite(x)
        if len(value) != 1:
            raise EvaluationError(
                f"{self.name!r} is not singleton-valued at {x.coords}")
        return value.points[0]

    def image_of_set(self, s: FiniteSet) -> FiniteSet:
        """Union of the (discretized) values over every point of s."""
        return union_finite(self.evaluate_finite(x) for x in s.points)

    @staticmethod
    def single_valued(name: str, fn: Callable[[Point], Point],
                      domain: DomainLike = None) -> "MultiMap":
        return MultiMap(name, lambda x: FiniteSet((fn(x),)), domain)


@dataclass(frozen=True)
class OrderViolation:
    """A reproducible counterexample: re-evaluating the stored sets and
    witnesses re-derives the failure."""

    relation: str
    detail: str
    sample: Point | None
    left: FiniteSet
    right: FiniteSet
    witness: tuple[Point, ...]


def set_leq_all(space: OrderedSpace, a: FiniteSet, b: FiniteSet) -> bool:
    """Every element of a below every element of b."""
    return all(space.leq(x, y) for x in a.points for y in b.points)


def set_leq_dhage(space: OrderedSpace, a: FiniteSet, b: FiniteSet) -> bool:
    """Every element of a below some element of b, and every element of b
    above some element of a."""
    for x in a.points:
        if not any(space.leq(x, y) for y in b.points):
            return False
    for y in b.points:
        if not any(space.leq(x, y) for x in a.points):
            return False
    return True


_SET_RELATIONS = {"all": set_leq_all, "dhage": set_leq_dhage}


def product_order(space_x: OrderedSpace, space_y: OrderedSpace,
                  a1: FiniteSet, b1: FiniteSet,
                  a2: FiniteSet, b2: FiniteSet, kind: str) -> bool:
    """Compare the products a1 x b1 and a2 x b2 factorwise.

    kind "ll" uses the all-pairs order on both factors, kind "lll" the
    Dhage order.
    """
    if kind == "ll":
        rel = set_leq_all
    elif kind == "lll":
        rel = set_leq_dhage
    else:
        raise ValueError(f"unknown product order kind {kind!r}")
    return rel(space_x, a1, a2) and rel(space_y, b1, b2)


def weakly_isotone_check(space: OrderedSpace, s: MultiMap, t: MultiMap,
                         samples: Union[FiniteSet, Iterable[Point]],
                         direction: str = "increasing",
                         relation: str = "all") -> list[OrderViolation]:
    """Check weak isotonicity of the pair (s, t) on the given samples.

    Increasing means s(x) below t(y) for every y in s(x) and t(x) below
    s(y) for every y in t(x); decreasing flips both comparisons. For
    singleton-valued maps this reduces to s(x) <= t(s(x)) and
    t(x) <= s(t(x)). Returns one violation per failing sample and side.
    """
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    rel = _SET_RELATIONS.get(relation)
    if rel is None:
        raise ValueError(f"unknown set relation {relation!r}")
    pts = samples.points if isinstance(samples, FiniteSet) else tuple(samples)
    violations: list[OrderViolation] = []
    label = f"weakly-isotone-{direction}-{relation}"
    for x in pts:
        sx = s.evaluate_finite(x)
        tx = t.evaluate_finite(x)
        for y in sx.points:
            ty = t.evaluate_finite(y)
            lo, hi = (sx, ty) if direction == "increasing" else (ty, sx)
            if not rel(space, lo, hi):
                violations.append(OrderViolation(
                    relation=label,
                    detail=f"{s.name}(x) vs {t.name}(y) for y in {s.name}(x)",
                    sample=x, left=lo, right=hi, witness=(y,)))
        for y in tx.points:
            sy = s.evaluate_finite(y)
            lo, hi = (tx, sy) if direction == "increasing" else (sy, tx)
            if not rel(space, lo, hi):
                violations.append(OrderViolation(
                    relation=label,
                    detail=f"{t.name}(x) vs {s.name}(y) for y in {t.name}(x)",
                    sample=x, left=lo, right=hi, witness=(y,)))
    return violations


def isotone_check(space: OrderedSpace, m: MultiMap,
                  samples: Union[FiniteSet, Iterable[Point]],
                  nondecreasing: bool = True,
                  relation: str = "all") -> list[OrderViolation]:
    """Check m(x) below m(y) (or above, for nonincreasing) over every
    comparable ordered pair of distinct samples."""
    rel = _SET_RELATIONS.get(relation)
    if rel is None:
        raise ValueError(f"unknown set relation {relation!r}")
    pts = samples.points if isinstance(samples, FiniteSet) else tuple(samples)
    images = {x.coords: m.evaluate_finite(x) for x in pts}
    violations: list[OrderViolation] = []
    word = "nondecreasing" if nondecreasing else "nonincreasing"
    for x in pts:
        for y in pts:
            if x.coords == y.coords or not space.leq(x, y):
                continue
            mx, my = images[x.coords], images[y.coords]
            lo, hi = (mx, my) if nondecreasing else (my, mx)
            if not rel(space, lo, hi):
                violations.append(OrderViolation(
                    relation=f"isotone-{word}-{relation}",
                    detail=f"{m.name} images not ordered over x <= y",
                    sample=x, left=lo, right=hi, witness=(y,)))
    return violations


@dataclass(frozen=True)
class SequenceContinuityEntry:
    index: int
    direction: str
    final_distance: float
    tail_max: float
    passed: bool


@dataclass(frozen=True)
class MonotoneContinuityReport:
    entries: tuple[SequenceContinuityEntry, ...]
    passed: bool


def monotone_continuous_check(space: OrderedSpace, f: MultiMap, x: Point,
                              sequences: Sequence[Sequence[Point]],
                              tol: float) -> MonotoneContinuityReport:
    """Check f(x_n) -> f(x) along monotone sequences converging to x.

    Each input sequence must be monotone in the cone order and end within
    tol of x under the max seminorm; both are preconditions and raise.
    A sequence passes when the image distances fall below tol over its
    final tail (the last quarter of the entries).
    """
    fx = f.evaluate_single(x)
    entries = []
    for idx, seq in enumerate(sequences):
        seq = list(seq)
        if not seq:
            raise ValueError(f"sequence {idx} is empty")
        nondec = all(space.leq(a, b) for a, b in zip(seq, seq[1:]))
        noninc = all(space.leq(b, a) for a, b in zip(seq, seq[1:]))
        if not (nondec or noninc):
            raise ValueError(f"sequence {idx} is not monotone in the cone order")
        if space.max_seminorm(seq[-1] - x) > tol:
            raise ValueError(
                f"sequence {idx} does not approach the limit point within {tol}")
        dists = [space.max_seminorm(f.evaluate_single(z) - fx) for z in seq]
        tail = dists[-max(1, len(dists) // 4):]
        tail_max = max(tail)
        entries.append(SequenceContinuityEntry(
            index=idx,
            direction="nondecreasing" if nondec else "nonincreasing",
            final_distance=dists[-1],
            tail_max=tail_max,
            passed=tail_max <= tol))
    return MonotoneContinuityReport(tuple(entries),
                                    all(e.passed for e in entries))
