"""Doubling and regularity constants for cellular spaces.

Cellular doubling bounds the number of maximal proper sub-cells; metric
doubling covers balls by half-radius balls; measure doubling bounds the
parent/child mass ratio.  Regularity pins child diameters between alpha and
beta times the parent diameter (beta < 1) and sibling separations above
gamma times the parent diameter.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .celltree import CellTree
from .errors import (
    IsolatedPoint,
    NotDecreasing,
    NotProbability,
    PointSetMismatch,
    ZeroDiameterInternalCell,
)
from .metrics import Geometry, MetricTable, WeightFn, critical_radii
from .spaces import ProductSpec

EXACT_COVER_CAP = 20  # balls with more candidate centers fall back to greedy


@dataclass(frozen=True)
class MeasureAtoms:
    """Strictly positive point masses; cell mass is the sum over its points."""

    labels: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.values):
            raise ValueError("one atom per point required")
        for v in self.values:
            if v <= 0:
                raise ValueError(f"atom {v} is not strictly positive")

    @classmethod
    def uniform(cls, tree: CellTree) -> "MeasureAtoms":
        n = tree.n_points
        return cls(tree.points, tuple(Fraction(1, n) for _ in range(n)))

    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def normalized(self) -> "MeasureAtoms":
        t = self.total()
        return MeasureAtoms(self.labels, tuple(v / t for v in self.values))

    def mass(self, indices) -> Fraction:
        return sum((self.values[i] for i in indices), Fraction(0))


def _check_alignment(tree: CellTree, mu: MeasureAtoms) -> None:
    if tuple(mu.labels) != tuple(tree.points):
        raise PointSetMismatch("measure labels differ from tree points")


def cell_doubling_constant(tree: CellTree) -> int:
    """Largest number of maximal proper sub-cells of any cell; 0 for a
    one-point space."""
    return max((len(tree.children[c]) for c in tree.cells()), default=0)


def measure_cell_doubling(tree: CellTree, mu: MeasureAtoms) -> Fraction:
    """Smallest k2 with mu(C) <= k2 * mu(C') on every edge, i.e. the largest
    parent/child mass ratio; 1 for a one-point space."""
    _check_alignment(tree, mu)
    best = Fraction(1)
    for c in tree.internal_cells():
        pm = mu.mass(tree.members[c])
        for ch in tree.children[c]:
            ratio = pm / mu.mass(tree.members[ch])
            if ratio > best:
                best = ratio
    return best


def product_measure(spec: ProductSpec, level_weights) -> MeasureAtoms:
    """Product of per-level probability vectors; one atom per leaf."""
    if len(level_weights) != spec.depth:
        raise NotProbability(
            f"need {spec.depth} level weight vectors, got {len(level_weights)}"
        )
    vecs = []
    for lvl, (size, weights) in enumerate(zip(spec.sizes, level_weights)):
        w = [Fraction(v) for v in weights]
        if len(w) != size:
            raise NotProbability(f"level {lvl} needs {size} weights, got {len(w)}")
        if any(v <= 0 for v in w):
            raise NotProbability(f"level {lvl} has a nonpositive weight")
        if sum(w) != 1:
            raise NotProbability(f"level {lvl} weights sum to {sum(w)}, not 1")
        vecs.append(w)
    labels = spec.labels()
    atoms = []
    for coords in iproduct(*(range(n) for n in spec.sizes)):
        a = Fraction(1)
        for lvl, c in enumerate(coords):
            a *= vecs[lvl][c]
        atoms.append(a)
    return MeasureAtoms(tuple(labels), tuple(atoms))


def sequence_regularity(rho_seq) -> tuple[Fraction, Fraction]:
    """(min, max) of consecutive ratios of a strictly decreasing positive
    sequence; the max is automatically below 1."""
    seq = [Fraction(v) for v in rho_seq]
    if len(seq) < 2:
        raise ValueError("need at least two sequence entries")
    if seq[-1] <= 0 or seq[0] <= 0:
        raise NotDecreasing("sequence must be positive")
    ratios = []
    for a, b in zip(seq, seq[1:]):
        if not 0 < b < a:
            raise NotDecreasing(f"sequence not strictly decreasing at {a} -> {b}")
        ratios.append(b / a)
    return min(ratios), max(ratios)


@dataclass(frozen=True)
class RegularityReport:
    """Extremal diameter ratios and sibling separations with witnesses.

    alpha/beta are min/max of diam(child)/diam(parent) over edges whose
    child has positive diameter; gamma is the min of dist(C', C'')/diam(C)
    over sibling pairs.  Fields are None when no edge or pair qualifies
    (one-point spaces, or trees whose children are all single points under
    a metric that gives singletons zero diameter).
    """

    alpha: Fraction | None
    beta: Fraction | None
    gamma: Fraction | None
    alpha_witness: tuple | None
    beta_witness: tuple | None
    gamma_witness: tuple | None
    sibling_separation_ratio: Fraction | None  # min dist/max(child diams); no verdict

    def passes(self) -> bool:
        if self.beta is not None and not self.beta < 1:
            return False
        if self.gamma is not None and not self.gamma > 0:
            return False
        return True


def metric_regularity(tree: CellTree, g: Geometry) -> RegularityReport:
    """Exact regularity constants of a geometry over the cell tree."""
    if g.tree is not tree and g.tree != tree:
        raise PointSetMismatch("geometry belongs to a different tree")
    for c in tree.internal_cells():
        if not g.diam(c) > 0:
            raise ZeroDiameterInternalCell(f"internal cell {c} has zero diameter")
    alpha = beta = gamma = aux = None
    alpha_w = beta_w = gamma_w = None
    for c in tree.cells():
        kids = tree.children[c]
        if not kids:
            continue
        dc = g.diam(c)
        for ch in kids:
            dch = g.diam(ch)
            if dch > 0:
                ratio = dch / dc
                if alpha is None or ratio < alpha:
                    alpha, alpha_w = ratio, (c, ch)
                if beta is None or ratio > beta:
                    beta, beta_w = ratio, (c, ch)
        for i in range(len(kids)):
            for j in range(i + 1, len(kids)):
                sep = g.separation(kids[i], kids[j])
                ratio = sep / dc
                if gamma is None or ratio < gamma:
                    gamma, gamma_w = ratio, (c, kids[i], kids[j])
                md = max(g.diam(kids[i]), g.diam(kids[j]))
                if md > 0:
                    r2 = sep / md
                    if aux is None or r2 < aux:
                        aux = r2
    return RegularityReport(alpha, beta, gamma, alpha_w, beta_w, gamma_w, aux)


def synthesize_regular_weight(tree: CellTree, beta) -> WeightFn:
    """Geometric weights beta^depth on internal cells, zero on leaves.

    The induced ultrametric has alpha = beta equal to the input ratio and
    gamma = 1.  Requires every internal node to have at least two children,
    which canonical CellTrees guarantee.
    """
    beta = Fraction(beta)
    if not 0 < beta < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {beta}")
    for c in tree.internal_cells():
        if len(tree.children[c]) < 2:
            raise IsolatedPoint(f"internal cell {c} has a single child")
    values = tuple(
        Fraction(0) if tree.is_leaf(c) else beta ** tree.depth[c]
        for c in tree.cells()
    )
    return WeightFn(tree, values)


# -- metric doubling ---------------------------------------------------------


@dataclass(frozen=True)
class DoublingResult:
    value: int
    exact: bool  # False when a greedy cover bound determined the value
    witness: tuple | None  # (center label, radius) attaining the value

    def __int__(self):
        return self.value


class _RadiusBalls:
    """Balls of a fixed table at query radii, via per-center sorted rows."""

    def __init__(self, table: MetricTable):
        self.table = table
        self.sorted_rows = []
        self.orders = []
        for i in range(table.n):
            pairs = sorted(zip(table.rows[i], range(table.n)))
            self.sorted_rows.append([p[0] for p in pairs])
            self.orders.append([p[1] for p in pairs])
        self._cache: dict = {}

    def ball(self, x: int, r) -> frozenset:
        key = (x, r)
        got = self._cache.get(key)
        if got is None:
            cnt = bisect_right(self.sorted_rows[x], r)
            got = frozenset(self.orders[x][:cnt])
            self._cache[key] = got
        return got


def _exact_min_cover(universe: frozenset, sets: list[frozenset]) -> int:
    """Minimum number of the given sets whose union contains the universe.

    Branch and bound on the first uncovered element; feasible because some
    set contains every element (each candidate ball contains its center).
    """
    order = sorted(universe)
    best = len(sets)

    def rec(uncovered: frozenset, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if not uncovered:
            best = used
            return
        pivot = next(e for e in order if e in uncovered)
        for s in sets:
            if pivot in s:
                rec(uncovered - s, used + 1)

    rec(universe, 0)
    return best


def _greedy_cover(universe: frozenset, sets: list[frozenset]) -> int:
    uncovered = set(universe)
    count = 0
    while uncovered:
        gain, chosen = max(
            ((len(s & uncovered), s) for s in sets),
            key=lambda p: (p[0], -min(p[1])),
        )
        if gain == 0:
            raise AssertionError("cover impossible; candidate balls miss points")
        uncovered -= chosen
        count += 1
    return count


def metric_doubling_constant(g: Geometry, radii=None) -> DoublingResult:
    """Largest minimum number of half-radius balls needed to cover any ball.

    Scans every center against the critical radii (realized distances plus
    midpoints).  A radius between consecutive values realized at a center
    gives the same ball with a larger half-radius, so its cover is never
    harder; the default scan therefore visits, per center, only the
    distances realized at that center, which attains the same maximum.
    Minimum covers are exact while the ball has at most EXACT_COVER_CAP
    candidate centers; larger balls use a greedy bound, and the result is
    flagged inexact only when a greedy bound exceeds every exact cover.
    """
    table = g.table
    if table.n <= 1:
        return DoublingResult(1, True, None)
    balls = _RadiusBalls(table)
    per_center = radii is None
    best_exact, wit_exact = 1, None
    best_greedy, wit_greedy = 0, None
    solved: dict = {}
    for x in range(table.n):
        if per_center:
            scan = sorted({v for v in table.rows[x] if v > 0})
        else:
            scan = radii
        for r in scan:
            b = balls.ball(x, r)
            half = r / 2
            key = (b, half)
            if key in solved:
                continue
            cand_sets = sorted(
                {balls.ball(y, half) for y in sorted(b)},
                key=lambda s: (-len(s), min(s)),
            )
            if len(b) <= EXACT_COVER_CAP:
                cnt = _exact_min_cover(b, cand_sets)
                solved[key] = (cnt, True)
                if cnt > best_exact:
                    best_exact, wit_exact = cnt, (table.labels[x], r)
            else:
                cnt = _greedy_cover(b, cand_sets)
                solved[key] = (cnt, False)
                if cnt > best_greedy:
                    best_greedy, wit_greedy = cnt, (table.labels[x], r)
    if best_greedy > best_exact:
        return DoublingResult(best_greedy, False, wit_greedy)
    return DoublingResult(best_exact, True, wit_exact)


def measure_metric_doubling(g: Geometry, mu: MeasureAtoms):
    """Largest ratio mu(B(x, r)) / mu(B(x, r/2)) over centers and critical
    radii; 1 for a one-point space."""
    table = g.table
    _check_alignment(g.tree, mu)
    if table.n <= 1:
        return Fraction(1)
    radii = critical_radii(table)
    best = Fraction(1)
    for x in range(table.n):
        pairs = sorted(zip(table.rows[x], range(table.n)))
        dists = [p[0] for p in pairs]
        prefix = [Fraction(0)]
        for _, idx in pairs:
            prefix.append(prefix[-1] + mu.values[idx])
        for r in radii:
            num = prefix[bisect_right(dists, r)]
            den = prefix[bisect_right(dists, r / 2)]
            ratio = num / den
            if ratio > best:
                best = ratio
    return best
