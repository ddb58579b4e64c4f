"""Zero-sum games on finite strategy grids, solved through best-response
correspondences and the common fixed point engine.

A game is a payoff table over two strategy grids living in cone-ordered
spaces. Best responses induce two multivalued maps on the product grid,
S(x, y) = N_y x {y} (argmax column responses) and T(x, y) = {x} x M_x
(argmin row responses); a common fixed point of the pair is a saddle point
and its payoff is the game value. An exhaustive minimax oracle runs
alongside the iteration on every solve, so the report always carries the
true maxmin/minmax regardless of whether the order hypotheses hold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixpoint import (FixpointCertificate, IterationTrace, SolverOptions,
                       iterate_common)
from .noncompact import alpha_product, diam
from .sets import FiniteSet
from .setmaps import MultiMap, OrderViolation, set_leq_dhage, weakly_isotone_check
from .spaces import (INEQUALITIES, ORTHANT, WEIGHTED_SUP, ConeSpec,
                     OrderedSpace, Point, SeminormSpec)

#: Cap on product-grid points probed by the weak isotonicity sample check.
ISOTONE_SAMPLE_CAP = 64


# ---------------------------------------------------------------------------
# Product spaces


@dataclass(frozen=True)
class ProductSpace:
    """A product of two ordered spaces with the componentwise cone and the
    max-of-factors product seminorms (one per pair of factor seminorms)."""

    space: OrderedSpace
    space_x: OrderedSpace
    space_y: OrderedSpace

    @property
    def dim_x(self) -> int:
        return self.space_x.dimension

    @property
    def dim_y(self) -> int:
        return self.space_y.dimension

    def join(self, x: Point, y: Point) -> Point:
        return Point(x.coords + y.coords)

    def split(self, c: Point) -> tuple[Point, Point]:
        return Point(c.coords[:self.dim_x]), Point(c.coords[self.dim_x:])


def _pad_rows(rows, left: int, right: int):
    return tuple((0.0,) * left + tuple(row) + (0.0,) * right for row in rows)


def product_seminorm(px: SeminormSpec, py: SeminormSpec,
                     dim_x: int, dim_y: int) -> SeminormSpec:
    """The seminorm max(px(x), py(y)) on the product space."""
    name = f"max({px.name},{py.name})"
    if px.kind == WEIGHTED_SUP and py.kind == WEIGHTED_SUP:
        return SeminormSpec.weighted(px.weights + py.weights, name)
    rows = _pad_rows(px.functional_rows(), 0, dim_y) \
        + _pad_rows(py.functional_rows(), dim_x, 0)
    if not rows:
        return SeminormSpec.weighted((0.0,) * (dim_x + dim_y), name)
    return SeminormSpec.functional(rows, name)


def _product_cone(cx: ConeSpec, cy: ConeSpec, dim_x: int, dim_y: int) -> ConeSpec:
    if cx.kind == ORTHANT and cy.kind == ORTHANT:
        return ConeSpec.orthant()
    rows_x = cx.rows if cx.kind == INEQUALITIES else tuple(
        tuple(1.0 if j == i else 0.0 for j in range(dim_x)) for i in range(dim_x))
    rows_y = cy.rows if cy.kind == INEQUALITIES else tuple(
        tuple(1.0 if j == i else 0.0 for j in range(dim_y)) for i in range(dim_y))
    return ConeSpec.inequalities(
        _pad_rows(rows_x, 0, dim_y) + _pad_rows(rows_y, dim_x, 0))


def product_space(space_x: OrderedSpace, space_y: OrderedSpace) -> ProductSpace:
    dx, dy = space_x.dimension, space_y.dimension
    seminorms = tuple(product_seminorm(px, py, dx, dy)
                      for px in space_x.seminorms for py in space_y.seminorms)
    combined = OrderedSpace(dx + dy,
                            _product_cone(space_x.cone, space_y.cone, dx, dy),
                            seminorms)
    return ProductSpace(combined, space_x, space_y)


def sigma_embed(a: Point, q: FiniteSet) -> FiniteSet:
    """Embed q into the product as {(a, q_i)}."""
    return FiniteSet(tuple(Point(a.coords + pt.coords) for pt in q.points))


def project(p: FiniteSet, axis: str, split: int) -> FiniteSet:
    """Componentwise projection of a product set, with deduplication."""
    dim = p.dimension
    if not 0 < split < dim:
        raise ValueError(f"split {split} does not divide dimension {dim}")
    if axis == "first":
        return FiniteSet(tuple(Point(pt.coords[:split]) for pt in p.points))
    if axis == "second":
        return FiniteSet(tuple(Point(pt.coords[split:]) for pt in p.points))
    raise ValueError(f"unknown axis {axis!r}")


# ---------------------------------------------------------------------------
# Games and best responses


@dataclass(frozen=True, eq=False)
class Game:
    """Strategy grids over two ordered spaces plus the payoff table of the
    maximizing player; entry [i][j] pays row strategy i against column
    strategy j."""

    space_x: OrderedSpace
    space_y: OrderedSpace
    grid_a: FiniteSet
    grid_b: FiniteSet
    payoff: np.ndarray

    def __post_init__(self):
        if self.grid_a.dimension != self.space_x.dimension:
            raise ValueError("grid A dimension does not match its space")
        if self.grid_b.dimension != self.space_y.dimension:
            raise ValueError("grid B dimension does not match its space")
        table = np.array(self.payoff, dtype=float)
        if table.shape != (len(self.grid_a), len(self.grid_b)):
            raise ValueError(
                f"payoff shape {table.shape} does not match grids "
                f"({len(self.grid_a)}, {len(self.grid_b)})")
        if not np.all(np.isfinite(table)):
            raise ValueError("payoff entries must be finite")
        table.setflags(write=False)
        object.__setattr__(self, "payoff", table)

    @property
    def shape(self) -> tuple[int, int]:
        return self.payoff.shape

    @property
    def payoff_range(self) -> float:
        return float(self.payoff.max() - self.payoff.min())

    @staticmethod
    def from_function(space_x: OrderedSpace, space_y: OrderedSpace,
                      grid_a: FiniteSet, grid_b: FiniteSet, fn) -> "Game":
        table = [[fn(x, y) for y in grid_b.points] for x in grid_a.points]
        return Game(space_x, space_y, grid_a, grid_b, np.asarray(table))


@dataclass(frozen=True)
class BestResponseTables:
    """Row guarantees phi, column guarantees psi, and the argmax/argmin
    index sets N (per column) and M (per row), with ties kept up to
    tie_eps; dropping ties would change the correspondences the fixed
    point argument is about."""

    phi: tuple[float, ...]
    psi: tuple[float, ...]
    n_sets: tuple[tuple[int, ...], ...]
    m_sets: tuple[tuple[int, ...], ...]
    tie_eps: float


def default_tie_eps(game: Game) -> float:
    return 1e-9 * game.payoff_range


def best_response_tables(game: Game, tie_eps: float | None = None
                         ) -> BestResponseTables:
    """Exact finite-grid best responses. N_y collects every row within
    tie_eps of the column maximum, M_x every column within tie_eps of the
    row minimum; both are nonempty on finite grids."""
    k = game.payoff
    if tie_eps is None:
        tie_eps = default_tie_eps(game)
    if tie_eps < 0.0:
        raise ValueError("tie_eps must be nonnegative")
    psi = k.max(axis=0)
    phi = k.min(axis=1)
    n_sets = tuple(
        tuple(int(i) for i in np.nonzero(k[:, j] >= psi[j] - tie_eps)[0])
        for j in range(k.shape[1]))
    m_sets = tuple(
        tuple(int(j) for j in np.nonzero(k[i, :] <= phi[i] + tie_eps)[0])
        for i in range(k.shape[0]))
    return BestResponseTables(
        phi=tuple(float(v) for v in phi),
        psi=tuple(float(v) for v in psi),
        n_sets=n_sets,
        m_sets=m_sets,
        tie_eps=float(tie_eps))


@dataclass(frozen=True)
class MinimaxOracle:
    maxmin: float
    minmax: float
    saddles: tuple[tuple[int, int], ...]


def minimax_oracle(game: Game) -> MinimaxOracle:
    """Exhaustive exact minimax: maxmin = max_i min_j K, minmax =
    min_j max_i K, and every cell that attains both its row minimum and its
    column maximum. maxmin <= minmax always."""
    k = game.payoff
    row_min = k.min(axis=1)
    col_max = k.max(axis=0)
    maxmin = float(row_min.max())
    minmax = float(col_max.min())
    hits = np.nonzero((k == row_min[:, None]) & (k == col_max[None, :]))
    saddles = tuple(sorted((int(i), int(j)) for i, j in zip(*hits)))
    return MinimaxOracle(maxmin=maxmin, minmax=minmax, saddles=saddles)


# ---------------------------------------------------------------------------
# Best-response maps on the product grid


def _grid_response_maps(prod: ProductSpace, grid_a: FiniteSet, grid_b: FiniteSet,
                        n_sets, m_sets, s_name: str, t_name: str
                        ) -> tuple[MultiMap, MultiMap]:
    ax_index = {pt.coords: i for i, pt in enumerate(grid_a.points)}
    by_index = {pt.coords: j for j, pt in enumerate(grid_b.points)}
    domain = FiniteSet(tuple(prod.join(x, y)
                             for x in grid_a.points for y in grid_b.points))

    def eval_s(c: Point) -> FiniteSet:
        _, y = prod.split(c)
        j = by_index[y.coords]
        return FiniteSet(tuple(prod.join(grid_a.points[i], y)
                               for i in n_sets[j]))

    def eval_t(c: Point) -> FiniteSet:
        x, _ = prod.split(c)
        i = ax_index[x.coords]
        return FiniteSet(tuple(prod.join(x, grid_b.points[j])
                               for j in m_sets[i]))

    return (MultiMap(s_name, eval_s, domain), MultiMap(t_name, eval_t, domain))


def build_maps(game: Game, tables: BestResponseTables,
               prod: ProductSpace | None = None) -> tuple[MultiMap, MultiMap]:
    """The two best-response maps on the product grid: S(x, y) = N_y x {y}
    and T(x, y) = {x} x M_x."""
    if prod is None:
        prod = product_space(game.space_x, game.space_y)
    return _grid_response_maps(prod, game.grid_a, game.grid_b,
                               tables.n_sets, tables.m_sets,
                               "best-response-S", "best-response-T")


def _response_hypothesis_violations(space_x: OrderedSpace, space_y: OrderedSpace,
                                    grid_a: FiniteSet, grid_b: FiniteSet,
                                    n_sets, m_sets) -> list[OrderViolation]:
    """The Dhage-order dominance conditions: the whole of B below M_x' for
    every best response x' to some column, and the whole of A below N_y'
    for every best response y' to some row. Exact on the grids; duplicate
    responses are reported once."""
    violations: list[OrderViolation] = []
    seen: set[tuple[str, int]] = set()
    for j in range(len(grid_b.points)):
        for i_prime in n_sets[j]:
            if ("m", i_prime) in seen:
                continue
            seen.add(("m", i_prime))
            m_pts = FiniteSet(tuple(grid_b.points[jj] for jj in m_sets[i_prime]))
            if not set_leq_dhage(space_y, grid_b, m_pts):
                violations.append(OrderViolation(
                    relation="grid-dhage-dominance",
                    detail=(f"B below M_x (Dhage) fails for row {i_prime}, "
                            f"a best response to column {j}"),
                    sample=grid_a.points[i_prime],
                    left=grid_b, right=m_pts, witness=()))
    for i in range(len(grid_a.points)):
        for j_prime in m_sets[i]:
            if ("n", j_prime) in seen:
                continue
            seen.add(("n", j_prime))
            n_pts = FiniteSet(tuple(grid_a.points[ii] for ii in n_sets[j_prime]))
            if not set_leq_dhage(space_x, grid_a, n_pts):
                violations.append(OrderViolation(
                    relation="grid-dhage-dominance",
                    detail=(f"A below N_y (Dhage) fails for column {j_prime}, "
                            f"a best response to row {i}"),
                    sample=grid_b.points[j_prime],
                    left=grid_a, right=n_pts, witness=()))
    return violations


def hypothesis3_check(game: Game, tables: BestResponseTables
                      ) -> list[OrderViolation]:
    """Check the order-dominance hypothesis on the best-response tables."""
    return _response_hypothesis_violations(
        game.space_x, game.space_y, game.grid_a, game.grid_b,
        tables.n_sets, tables.m_sets)


@dataclass(frozen=True)
class CondensingDiagnostic:
    """Measure comparison for the section embeddings and projections on the
    grids, recorded in both strict and non-strict form; strictness fails by
    construction whenever the compared measures coincide."""

    name: str
    alpha_in: float
    alpha_out: float
    strict_holds: bool
    nonstrict_holds: bool


def _condensing_diagnostics(game: Game) -> tuple[CondensingDiagnostic, ...]:
    out = []
    for px in game.space_x.seminorms:
        for py in game.space_y.seminorms:
            d_a = diam(game.grid_a, px)
            d_b = diam(game.grid_b, py)
            pair = f"{px.name},{py.name}"
            # sigma embeds one factor at a fixed point of the other; the
            # product measure of the embedded set equals the factor measure.
            for label, d_fac in (("sigma-on-A", d_a), ("sigma-on-B", d_b)):
                emb = alpha_product(0.0, d_fac)
                out.append(CondensingDiagnostic(
                    name=f"{label}[{pair}]", alpha_in=d_fac, alpha_out=emb,
                    strict_holds=emb < d_fac, nonstrict_holds=emb <= d_fac))
            d_prod = alpha_product(d_a, d_b)
            out.append(CondensingDiagnostic(
                name=f"pi-A[{pair}]", alpha_in=d_prod, alpha_out=d_a,
                strict_holds=d_a < d_prod, nonstrict_holds=d_a <= d_prod))
            out.append(CondensingDiagnostic(
                name=f"pi-B[{pair}]", alpha_in=d_prod, alpha_out=d_b,
                strict_holds=d_b < d_prod, nonstrict_holds=d_b <= d_prod))
    return tuple(out)


@dataclass(frozen=True)
class GameHypotheses:
    isotone_violations: tuple[OrderViolation, ...]
    hypothesis3_violations: tuple[OrderViolation, ...]
    condensing: tuple[CondensingDiagnostic, ...]
    samples_checked: int
    satisfied: bool


def _isotone_samples(prod: ProductSpace, grid_a: FiniteSet, grid_b: FiniteSet,
                     cap: int) -> list[Point]:
    na, nb = len(grid_a), len(grid_b)
    per_axis = max(1, int(cap ** 0.5))
    stride_a = max(1, -(-na // per_axis))
    stride_b = max(1, -(-nb // per_axis))
    idx_a = sorted(set(range(0, na, stride_a)) | {na - 1})
    idx_b = sorted(set(range(0, nb, stride_b)) | {nb - 1})
    return [prod.join(grid_a.points[i], grid_b.points[j])
            for i in idx_a for j in idx_b]


def _check_hypotheses(prod: ProductSpace, s: MultiMap, t: MultiMap,
                      game: Game, tables: BestResponseTables,
                      sample_cap: int) -> GameHypotheses:
    samples = _isotone_samples(prod, game.grid_a, game.grid_b, sample_cap)
    iso = weakly_isotone_check(prod.space, s, t, samples,
                               direction="increasing", relation="dhage")
    h3 = hypothesis3_check(game, tables)
    cond = _condensing_diagnostics(game)
    # Non-strict condensing is the default acceptance here: the embedding
    # side cannot be strict because the product measure of an embedded
    # factor equals the factor measure.
    satisfied = not iso and not h3 and all(d.nonstrict_holds for d in cond)
    return GameHypotheses(tuple(iso), tuple(h3), cond, len(samples), satisfied)


# ---------------------------------------------------------------------------
# Solving


@dataclass(frozen=True)
class SaddleReport:
    outcome: str  # "saddle-found" | "hypotheses-not-satisfied" | "no-convergence"
    value: float | None
    saddle: tuple[int, int] | None
    saddle_point: tuple[Point, Point] | None
    maxmin: float
    minmax: float
    oracle_saddles: tuple[tuple[int, int], ...]
    hypotheses: GameHypotheses
    tie_eps: float
    start: tuple[Point, Point]
    grid_shape: tuple[int, int]
    trace: IterationTrace | None
    certificate: FixpointCertificate | None


def _start_pair(game: Game, start) -> tuple[Point, Point]:
    if start is None:
        return game.grid_a.lex_min(), game.grid_b.lex_min()
    x0, y0 = start
    x0 = x0 if isinstance(x0, Point) else Point.of(x0)
    y0 = y0 if isinstance(y0, Point) else Point.of(y0)
    if x0 not in game.grid_a:
        raise ValueError(f"start x {x0.coords} is not a grid A point")
    if y0 not in game.grid_b:
        raise ValueError(f"start y {y0.coords} is not a grid B point")
    return x0, y0


def solve_game(game: Game, start=None, opts: SolverOptions | None = None,
               tie_eps: float | None = None,
               sample_cap: int = ISOTONE_SAMPLE_CAP) -> SaddleReport:
    """Solve a game: run the hypothesis checks, iterate the best-response
    maps from the start pair (default: the lexicographically smallest grid
    pair) and certify any fixed point as a saddle against the tables. The
    exhaustive oracle result is always included; failed hypotheses do not
    abort, they only label the outcome when no saddle gets certified.
    """
    opts = opts or SolverOptions()
    tables = best_response_tables(game, tie_eps)
    oracle = minimax_oracle(game)
    prod = product_space(game.space_x, game.space_y)
    s, t = build_maps(game, tables, prod)
    hypotheses = _check_hypotheses(prod, s, t, game, tables, sample_cap)
    x0, y0 = _start_pair(game, start)
    trace, cert = iterate_common(prod.space, s, t, prod.join(x0, y0), opts)

    ax_index = {pt.coords: i for i, pt in enumerate(game.grid_a.points)}
    by_index = {pt.coords: j for j, pt in enumerate(game.grid_b.points)}
    saddle = None
    value = None
    saddle_point = None
    if cert is not None and cert.accepted:
        xs, ys = prod.split(cert.point)
        i = ax_index.get(xs.coords)
        j = by_index.get(ys.coords)
        if i is not None and j is not None \
                and i in tables.n_sets[j] and j in tables.m_sets[i]:
            saddle = (i, j)
            value = float(game.payoff[i, j])
            saddle_point = (xs, ys)
    if saddle is not None:
        outcome = "saddle-found"
    elif not hypotheses.satisfied:
        outcome = "hypotheses-not-satisfied"
    else:
        outcome = "no-convergence"
    return SaddleReport(
        outcome=outcome,
        value=value,
        saddle=saddle,
        saddle_point=saddle_point,
        maxmin=oracle.maxmin,
        minmax=oracle.minmax,
        oracle_saddles=oracle.saddles,
        hypotheses=hypotheses,
        tie_eps=tables.tie_eps,
        start=(x0, y0),
        grid_shape=game.shape,
        trace=trace,
        certificate=cert)


# ---------------------------------------------------------------------------
# Section intersection


@dataclass(frozen=True, eq=False)
class SectionedSets:
    """Two subsets Q, Q' of a product grid given by membership tables, with
    the derived sections N_y = {x : (x, y) in Q} and M_x = {y : (x, y) in Q'}."""

    space_x: OrderedSpace
    space_y: OrderedSpace
    grid_a: FiniteSet
    grid_b: FiniteSet
    q: np.ndarray
    qprime: np.ndarray

    def __post_init__(self):
        shape = (len(self.grid_a), len(self.grid_b))
        for label, table in (("Q", self.q), ("Q'", self.qprime)):
            arr = np.array(table, dtype=bool)
            if arr.shape != shape:
                raise ValueError(f"{label} table shape {arr.shape} does not "
                                 f"match grids {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, "q" if label == "Q" else "qprime", arr)

    def n_set(self, j: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.q[:, j])[0])

    def m_set(self, i: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.nonzero(self.qprime[i, :])[0])

    def empty_sections(self) -> list[str]:
        out = []
        for j in range(len(self.grid_b)):
            if not self.q[:, j].any():
                out.append(f"N_y empty at column {j}")
        for i in range(len(self.grid_a)):
            if not self.qprime[i, :].any():
                out.append(f"M_x empty at row {i}")
        return out


@dataclass(frozen=True)
class IntersectReport:
    outcome: str  # "fixed-point-found" | "precondition-violation" | ...
    point: tuple[Point, Point] | None
    indices: tuple[int, int] | None
    in_q: bool | None
    in_qprime: bool | None
    empty_sections: tuple[str, ...]
    hypothesis3_violations: tuple[OrderViolation, ...]
    trace: IterationTrace | None
    certificate: FixpointCertificate | None


def intersect_sections(sets: SectionedSets, opts: SolverOptions | None = None,
                       start=None) -> IntersectReport:
    """Search for a common point of Q and Q' by iterating the section maps
    S(x, y) = N_y x {y} and T(x, y) = {x} x M_x. A certified common fixed
    point is re-verified against both membership tables exactly. Empty
    sections are a precondition violation and reported without iterating."""
    opts = opts or SolverOptions()
    empty = sets.empty_sections()
    if empty:
        return IntersectReport(
            outcome="precondition-violation", point=None, indices=None,
            in_q=None, in_qprime=None, empty_sections=tuple(empty),
            hypothesis3_violations=(), trace=None, certificate=None)
    n_sets = tuple(sets.n_set(j) for j in range(len(sets.grid_b)))
    m_sets = tuple(sets.m_set(i) for i in range(len(sets.grid_a)))
    h3 = _response_hypothesis_violations(
        sets.space_x, sets.space_y, sets.grid_a, sets.grid_b, n_sets, m_sets)
    prod = product_space(sets.space_x, sets.space_y)
    s, t = _grid_response_maps(prod, sets.grid_a, sets.grid_b, n_sets, m_sets,
                               "section-S", "section-T")
    if start is None:
        x0, y0 = sets.grid_a.lex_min(), sets.grid_b.lex_min()
    else:
        x0, y0 = start
    trace, cert = iterate_common(prod.space, s, t, prod.join(x0, y0), opts)
    if cert is not None and cert.accepted:
        xs, ys = prod.split(cert.point)
        i = next(i for i, pt in enumerate(sets.grid_a.points)
                 if pt.coords == xs.coords)
        j = next(j for j, pt in enumerate(sets.grid_b.points)
                 if pt.coords == ys.coords)
        in_q = bool(sets.q[i, j])
        in_qprime = bool(sets.qprime[i, j])
        outcome = "fixed-point-found" if (in_q and in_qprime) else "no-convergence"
        return IntersectReport(
            outcome=outcome, point=(xs, ys), indices=(i, j),
            in_q=in_q, in_qprime=in_qprime, empty_sections=(),
            hypothesis3_violations=tuple(h3), trace=trace, certificate=cert)
    outcome = "hypotheses-not-satisfied" if h3 else "no-convergence"
    return IntersectReport(
        outcome=outcome, point=None, indices=None, in_q=None, in_qprime=None,
        empty_sections=(), hypothesis3_violations=tuple(h3),
        trace=trace, certificate=cert)
