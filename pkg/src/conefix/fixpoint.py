"""Alternating common fixed point iteration for a pair of multivalued maps.

The engine generates x1 in S(x0), x2 in T(x1), x3 in S(x2), ... with a
deterministic selection rule, audits the order chain along the way and stops
on a windowed Cauchy criterion. A candidate limit is certified by residuals:
the per-seminorm distance from the point to each map's value at it. Monotone
chains converge under the usual hypotheses, so the stock convergence test
demands monotonicity; non-monotone runs degrade to a best-effort iteration
that needs a ten times tighter window and is labelled as such on the
certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, ImageExplosionError
from .noncompact import EXACT_THRESHOLD, MeasureValue, alpha_k
from .sets import FiniteSet, union_finite
from .setmaps import MultiMap, weakly_isotone_check
from .spaces import OrderedSpace, Point, SeminormSpec

SELECTORS = ("order-minimal", "nearest-previous", "first")


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 500
    selector: str = "order-minimal"
    direction: str = "auto"  # "increasing" | "decreasing" | "auto"
    window: int = 5
    preflight: bool = False
    preflight_budget: int = 3

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.direction not in ("increasing", "decreasing", "auto"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.preflight_budget < 1:
            raise ValueError("preflight budget must be at least 1")


@dataclass(frozen=True)
class TraceStep:
    index: int
    map_name: str
    candidates: FiniteSet
    selected: Point
    order_ok: bool
    step_sizes: tuple[tuple[str, float], ...]


@dataclass
class IterationTrace:
    """Mutable record of one engine run; owned by a single run at a time.

    Step i applies S for even i and T for odd i, producing the point
    x_{i+1} from x_i. The order audit flags every step whose transition
    breaks the chain in the run's direction; the chain relevant to the
    convergence argument starts at x1, so step 0 is recorded but excluded
    from the monotonicity verdict.
    """

    start: Point
    direction: str
    steps: list[TraceStep] = field(default_factory=list)
    status: str = "running"
    preflight: dict | None = None

    @property
    def monotone(self) -> bool:
        return all(st.order_ok for st in self.steps[1:])

    def points(self) -> list[Point]:
        return [self.start] + [st.selected for st in self.steps]

    def last_point(self) -> Point:
        return self.steps[-1].selected if self.steps else self.start


@dataclass(frozen=True)
class FixpointCertificate:
    """Residual evidence that a point is a common fixed point: per-seminorm
    distance from the point to each map's value at it, recomputed directly
    rather than read off the trace."""

    point: Point
    residual_s: MeasureValue
    residual_t: MeasureValue
    iterations: int
    monotone: bool
    tol: float
    accepted: bool


def residual(space: OrderedSpace, x: Point, m: MultiMap) -> MeasureValue:
    """Per-seminorm distance from x to the value set m(x); zero exactly when
    x belongs to the value set as represented.

    Finite values take the exact minimum over members. For a box value,
    membership gives zero; otherwise the minimum runs over the componentwise
    clamp of x into each box (exact for weighted-sup seminorms) together
    with the box vertices and centroids, which upper-bounds the true
    distance, keeping accepted certificates sound.
    """
    value = m.evaluate(x)
    if isinstance(value, FiniteSet):
        candidates = value.points
    else:
        if value.contains(x):
            return MeasureValue(tuple((p.name, 0.0) for p in space.seminorms))
        clamped = [
            Point(tuple(min(max(c, a), b)
                        for c, a, b in zip(x.coords, lo.coords, hi.coords)))
            for lo, hi in value.boxes
        ]
        candidates = tuple(clamped) + tuple(value.vertices()) + tuple(value.centroids())
    entries = tuple(
        (p.name, min(p(x - y) for y in candidates)) for p in space.seminorms
    )
    return MeasureValue(entries)


def _select(space: OrderedSpace, candidates: FiniteSet, previous: Point,
            selector: str) -> Point:
    pts = candidates.points
    if selector == "first":
        return pts[0]
    if selector == "nearest-previous":
        return min(pts, key=lambda q: (space.max_seminorm(q - previous), q.coords))
    # order-minimal: candidates with no other candidate strictly below them,
    # ties broken lexicographically.
    minimal = []
    for q in pts:
        dominated = any(
            r.coords != q.coords and space.leq(r, q) and not space.leq(q, r)
            for r in pts)
        if not dominated:
            minimal.append(q)
    return min(minimal, key=lambda q: q.coords)


def _window_small(trace: IterationTrace, tol: float, window: int) -> bool:
    for st in trace.steps[-window:]:
        for _, size in st.step_sizes:
            if size > tol:
                return False
    return True


def detect_convergence(trace: IterationTrace, space: OrderedSpace,
                       tol: float, window: int) -> bool:
    """True iff the last ``window`` consecutive differences are below tol in
    every seminorm and the trace chain is monotone. Monotone plus clustering
    is what makes the limit genuine rather than a stall of a cycle."""
    if window < 1:
        raise ValueError("window must be at least 1")
    if window > len(trace.steps):
        raise ValueError(
            f"window {window} exceeds trace length {len(trace.steps)}")
    if not trace.monotone:
        return False
    return _window_small(trace, tol, window)


def _certificate(space: OrderedSpace, s: MultiMap, t: MultiMap, x: Point,
                 tol: float, monotone: bool, iterations: int) -> FixpointCertificate:
    rs = residual(space, x, s)
    rt = residual(space, x, t)
    accepted = rs.max_value() <= tol and rt.max_value() <= tol
    return FixpointCertificate(x, rs, rt, iterations, monotone, tol, accepted)


def _auto_direction(space: OrderedSpace, s: MultiMap, t: MultiMap,
                    x0: Point) -> str:
    sample = (x0,)
    if not weakly_isotone_check(space, s, t, sample, "increasing", "all"):
        return "increasing"
    if not weakly_isotone_check(space, s, t, sample, "decreasing", "all"):
        return "decreasing"
    return "increasing"


def iterate_common(space: OrderedSpace, s: MultiMap, t: MultiMap, x0: Point,
                   opts: SolverOptions | None = None
                   ) -> tuple[IterationTrace, FixpointCertificate | None]:
    """Run the alternating iteration from x0.

    Returns the trace plus an accepted certificate on success, or the trace
    plus None when max_iter is exhausted. A start point that is already a
    common fixed point (all residuals within tol) returns immediately with a
    zero-step trace.
    """
    opts = opts or SolverOptions()
    for m in (s, t):
        if not m.contains(x0):
            raise DomainError(
                f"start point {x0.coords} is outside the domain of {m.name!r}")
    if opts.direction == "auto":
        direction = _auto_direction(space, s, t, x0)
    else:
        direction = opts.direction
    trace = IterationTrace(start=x0, direction=direction)
    if opts.preflight:
        trace.preflight = {
            p.name: condensing_preflight(space, s, t, FiniteSet((x0,)),
                                         opts.preflight_budget, p)
            for p in space.seminorms
        }
    cert = _certificate(space, s, t, x0, opts.tol, True, 0)
    if cert.accepted:
        trace.status = "already-fixed"
        return trace, cert
    prev = x0
    for i in range(opts.max_iter):
        m = s if i % 2 == 0 else t
        candidates = m.evaluate_finite(prev)
        nxt = _select(space, candidates, prev, opts.selector)
        if direction == "increasing":
            order_ok = space.leq(prev, nxt)
        else:
            order_ok = space.leq(nxt, prev)
        sizes = tuple((p.name, p(nxt - prev)) for p in space.seminorms)
        trace.steps.append(TraceStep(i, m.name, candidates, nxt, order_ok, sizes))
        prev = nxt
        if len(trace.steps) >= opts.window:
            if trace.monotone:
                converged = detect_convergence(trace, space, opts.tol, opts.window)
            else:
                converged = _window_small(trace, opts.tol * 0.1, opts.window)
            if converged:
                cert = _certificate(space, s, t, prev, opts.tol,
                                    trace.monotone, len(trace.steps))
                if cert.accepted:
                    trace.status = "converged"
                    return trace, cert
    trace.status = "max-iterations"
    return trace, None


@dataclass(frozen=True)
class PreflightRound:
    set_size: int
    alpha_set: float
    alpha_s_image: float
    alpha_t_image: float
    heuristic: bool


@dataclass(frozen=True)
class PreflightReport:
    """Heuristic evidence for the condensing behaviour of a pair of maps:
    the seed set is grown through {a} union S(A) union T(A) for a few
    rounds, and the budgeted measure must drop strictly across each map
    application on every round where it is positive."""

    seminorm: str
    budget: int
    rounds: tuple[PreflightRound, ...]
    status: str  # "pass" | "fail" | "vacuous"
    heuristic: bool = True


def condensing_preflight(space: OrderedSpace, s: MultiMap, t: MultiMap,
                         seed: FiniteSet, k: int, p: SeminormSpec,
                         rounds: int = 3, cap: int = 2000,
                         exact_threshold: int = EXACT_THRESHOLD
                         ) -> PreflightReport:
    """Grow A through {a} union S(A) union T(A) and track the budgeted
    measure. Raises :class:`ImageExplosionError` when the union outgrows
    ``cap`` points."""
    anchor = FiniteSet((seed.points[0],))
    current = seed
    entries = []
    for _ in range(rounds):
        s_image = s.image_of_set(current)
        t_image = t.image_of_set(current)
        a_set = alpha_k(current, p, k, exact_threshold)
        a_s = alpha_k(s_image, p, k, exact_threshold)
        a_t = alpha_k(t_image, p, k, exact_threshold)
        entries.append(PreflightRound(
            set_size=len(current),
            alpha_set=a_set.value,
            alpha_s_image=a_s.value,
            alpha_t_image=a_t.value,
            heuristic=a_set.heuristic or a_s.heuristic or a_t.heuristic))
        current = union_finite((anchor, s_image, t_image))
        if len(current) > cap:
            raise ImageExplosionError(
                f"preflight union grew to {len(current)} points, cap is {cap}")
    positive = [e for e in entries if e.alpha_set > 0.0]
    if not positive:
        status = "vacuous"
    elif all(e.alpha_s_image < e.alpha_set and e.alpha_t_image < e.alpha_set
             for e in positive):
        status = "pass"
    else:
        status = "fail"
    return PreflightReport(seminorm=p.name, budget=k,
                           rounds=tuple(entries), status=status)
