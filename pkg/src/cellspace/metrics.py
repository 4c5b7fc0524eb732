"""Ultrametrics from cell weights, metric validation, and ball geometry.

A weight function assigns each cell a nonnegative value, zero exactly on
singletons and strictly decreasing along inclusion; the induced distance
d(x, y) = weight of the minimal cell containing both points is an
ultrametric whose closed balls are exactly the cells.  This module builds
those metrics, re-checks the claims exhaustively, and provides exact
cell diameters and separations for table- and interval-derived geometry.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .celltree import CellTree
from .errors import (
    DepthMismatch,
    NotDecreasing,
    OverlappingCells,
    PointSetMismatch,
)
from .spaces import IntervalEmbedding

_INT64_LIMIT = 2**62


@dataclass(frozen=True)
class MetricTable:
    """Symmetric distance matrix over labeled points.

    Entries are exact Fractions by default; imported float tables carry an
    explicit comparison tolerance.
    """

    labels: tuple[str, ...]
    rows: tuple[tuple, ...]
    exact: bool = True
    tol: float = 0.0

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown point {label!r}") from None

    @property
    def _index(self):
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.labels)}
            self.__dict__["_index_cache"] = idx
        return idx

    def d(self, i: int, j: int):
        return self.rows[i][j]

    def d_label(self, x: str, y: str):
        return self.rows[self.index(x)][self.index(y)]

    @property
    def float_rows(self):
        """Float view of the table, cached; selection aid only, never used
        where exactness matters."""
        fr = self.__dict__.get("_float_rows_cache")
        if fr is None:
            fr = [[float(v) for v in row] for row in self.rows]
            self.__dict__["_float_rows_cache"] = fr
        return fr

    def scale(self, c) -> "MetricTable":
        c = Fraction(c) if self.exact else float(c)
        return MetricTable(
            self.labels,
            tuple(tuple(c * v for v in row) for row in self.rows),
            exact=self.exact,
            tol=self.tol,
        )

    def check_metric(self) -> "MetricVerdict":
        """Zero diagonal, symmetry, positivity, and the triangle inequality."""
        n = self.n
        for i in range(n):
            if self.rows[i][i] != 0:
                return MetricVerdict(False, "nonzero diagonal", (self.labels[i],))
            for j in range(i + 1, n):
                v = self.rows[i][j]
                if v != self.rows[j][i]:
                    return MetricVerdict(
                        False, "asymmetric", (self.labels[i], self.labels[j])
                    )
                if v <= 0:
                    return MetricVerdict(
                        False, "nonpositive distance", (self.labels[i], self.labels[j])
                    )
        wit = _triangle_witness(self)
        if wit is not None:
            x, z, y = wit
            return MetricVerdict(
                False, "triangle inequality fails", (self.labels[x], self.labels[z], self.labels[y])
            )
        return MetricVerdict(True, "", ())


@dataclass(frozen=True)
class MetricVerdict:
    ok: bool
    reason: str
    witness: tuple


def _int_matrix(table: MetricTable):
    """Common-denominator integer rescale of an exact table, or None if the
    values do not fit int64 (callers then fall back to exact loops)."""
    if not table.exact:
        return None
    den = 1
    for row in table.rows:
        for v in row:
            den = lcm(den, v.denominator)
            if den >= _INT64_LIMIT:
                return None
    mx = 0
    scaled = []
    for row in table.rows:
        r = [int(v * den) for v in row]
        mx = max(mx, max(r, default=0))
        scaled.append(r)
    if mx * 2 >= _INT64_LIMIT:
        return None
    return np.array(scaled, dtype=np.int64)


def _triangle_witness(table: MetricTable):
    n = table.n
    mat = _int_matrix(table)
    if mat is not None:
        ok = True
        for y in range(n):
            if (mat > mat[:, y][:, None] + mat[y, :][None, :]).any():
                ok = False
                break
        if ok:
            return None
    elif not table.exact:
        mat = np.array(table.rows, dtype=float)
        ok = True
        for y in range(n):
            if (mat > mat[:, y][:, None] + mat[y, :][None, :] + table.tol).any():
                ok = False
                break
        if ok:
            return None
    slack = table.tol if not table.exact else 0
    for x in range(n):
        for z in range(n):
            dxz = table.rows[x][z]
            for y in range(n):
                if dxz > table.rows[x][y] + table.rows[y][z] + slack:
                    return (x, z, y)
    return None


@dataclass(frozen=True)
class WeightFn:
    """Cell weights: zero exactly on leaves, strictly decreasing on edges."""

    tree: CellTree
    values: tuple[Fraction, ...]

    def __post_init__(self):
        t = self.tree
        if len(self.values) != t.n_cells:
            raise ValueError("one weight per cell required")
        for c in t.cells():
            v = self.values[c]
            if t.is_leaf(c):
                if v != 0:
                    raise ValueError(f"leaf cell {c} must have weight 0, got {v}")
            else:
                if v <= 0:
                    raise ValueError(f"internal cell {c} must have positive weight")
                for ch in t.children[c]:
                    if not t.is_leaf(ch) and not self.values[ch] < v:
                        raise NotDecreasing(
                            f"weight does not strictly decrease on edge {c} -> {ch}"
                        )

    def __getitem__(self, c: int) -> Fraction:
        return self.values[c]


def weight_from_sequence(tree: CellTree, rho_seq) -> WeightFn:
    """Depth-indexed weights on a uniform-depth (product-style) tree.

    The sequence must run 1 = rho_0 > rho_1 > ... > rho_L > 0 where L is the
    common leaf depth; internal cells at depth l get rho_l, leaves get 0.
    """
    seq = [Fraction(v) for v in rho_seq]
    if not seq or seq[0] != 1:
        raise NotDecreasing("sequence must start at rho_0 = 1")
    for a, b in zip(seq, seq[1:]):
        if not b < a:
            raise NotDecreasing(f"sequence not strictly decreasing at {a} -> {b}")
    if seq[-1] <= 0:
        raise NotDecreasing("sequence must stay positive")
    leaf_depths = {tree.depth[c] for c in tree.leaves()}
    if len(leaf_depths) != 1:
        raise DepthMismatch("tree does not have uniform leaf depth")
    depth = leaf_depths.pop()
    if len(seq) != depth + 1:
        raise DepthMismatch(f"need {depth + 1} sequence entries, got {len(seq)}")
    values = tuple(
        Fraction(0) if tree.is_leaf(c) else seq[tree.depth[c]] for c in tree.cells()
    )
    return WeightFn(tree, values)


def ultrametric_from_weight(tree: CellTree, w: WeightFn) -> MetricTable:
    """d(x, y) = weight of the minimal cell containing x and y; 0 on the
    diagonal.  Satisfies the strong triangle inequality by construction."""
    if w.tree is not tree and w.tree != tree:
        raise ValueError("weight function belongs to a different tree")
    n = tree.n_points
    rows = [[Fraction(0)] * n for _ in range(n)]
    for c in tree.internal_cells():
        v = w[c]
        kids = tree.children[c]
        for a in range(len(kids)):
            ma = tree.members[kids[a]]
            for b in range(a + 1, len(kids)):
                for i in ma:
                    for j in tree.members[kids[b]]:
                        rows[i][j] = v
                        rows[j][i] = v
    return MetricTable(tree.points, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class UltrametricVerdict:
    ok: bool
    witness: tuple | None = None  # (x, z, y) labels with d(x,z) > max(...)
    slack: object = None

    def __bool__(self):
        return self.ok


def validate_ultrametric(m: MetricTable) -> UltrametricVerdict:
    """Exhaustive triple scan of d(x, z) <= max(d(x, y), d(y, z)).

    Returns the lexicographically smallest witness triple and its slack on
    failure.  Exact tables are scanned with integer arithmetic.
    """
    n = m.n
    mat = _int_matrix(m)
    violated = None
    if mat is not None:
        for y in range(n):
            if (mat > np.maximum(mat[:, y][:, None], mat[y, :][None, :])).any():
                violated = True
                break
        if violated is None:
            return UltrametricVerdict(True)
    slack_tol = m.tol if not m.exact else 0
    for x in range(n):
        row_x = m.rows[x]
        for z in range(n):
            dxz = row_x[z]
            for y in range(n):
                bound = max(row_x[y], m.rows[y][z])
                if dxz > bound + slack_tol:
                    return UltrametricVerdict(
                        False,
                        witness=(m.labels[x], m.labels[z], m.labels[y]),
                        slack=dxz - bound,
                    )
    return UltrametricVerdict(True)


# -- geometry ---------------------------------------------------------------


@dataclass(frozen=True)
class Geometry:
    """Point metric plus exact cell diameter and separation functions.

    Table-derived geometry takes the max/min over point pairs.  Interval
    geometry uses hull lengths and hull gaps, which are the exact limit-set
    values of the truncated construction; its point metric samples each leaf
    at the endpoint facing its sibling, so sibling gaps are realized
    exactly by the sample.
    """

    tree: CellTree
    table: MetricTable
    source: str
    _diams: tuple
    _hulls: tuple | None = None

    def diam(self, c: int):
        return self._diams[c]

    def separation(self, c1: int, c2: int):
        if self.tree.members[c1] & self.tree.members[c2]:
            raise OverlappingCells(f"cells {c1} and {c2} intersect")
        if self._hulls is not None:
            (l1, r1), (l2, r2) = self._hulls[c1], self._hulls[c2]
            gap = l2 - r1 if l1 <= l2 else l1 - r2
            assert gap >= 0, "disjoint cells with overlapping hulls"
            return gap
        best = None
        for i in self.tree.members[c1]:
            row = self.table.rows[i]
            for j in self.tree.members[c2]:
                v = row[j]
                if best is None or v < best:
                    best = v
        return best

    @classmethod
    def from_table(cls, tree: CellTree, table: MetricTable) -> "Geometry":
        if tuple(table.labels) != tuple(tree.points):
            raise PointSetMismatch("table labels differ from tree points")
        diams = [Fraction(0) if table.exact else 0.0] * tree.n_cells
        for c in sorted(tree.cells(), key=lambda c: -tree.depth[c]):
            kids = tree.children[c]
            if not kids:
                continue
            best = max(diams[k] for k in kids)
            for a in range(len(kids)):
                ma = tree.members[kids[a]]
                for b in range(a + 1, len(kids)):
                    for i in ma:
                        row = table.rows[i]
                        for j in tree.members[kids[b]]:
                            if row[j] > best:
                                best = row[j]
            diams[c] = best
        return cls(tree, table, "table", tuple(diams))

    @classmethod
    def from_intervals(cls, tree: CellTree, emb: IntervalEmbedding) -> "Geometry":
        if len(emb.intervals) != tree.n_points:
            raise PointSetMismatch("one interval per point required")
        hulls = [None] * tree.n_cells
        for c in sorted(tree.cells(), key=lambda c: -tree.depth[c]):
            if tree.is_leaf(c):
                hulls[c] = emb.intervals[next(iter(tree.members[c]))]
            else:
                kids = tree.children[c]
                hulls[c] = (
                    min(hulls[k][0] for k in kids),
                    max(hulls[k][1] for k in kids),
                )
        diams = tuple(r - l for l, r in hulls)
        reps = []
        for i in range(tree.n_points):
            leaf = tree.leaf_of[i]
            par = tree.parent[leaf]
            left, right = emb.intervals[i]
            if par is None:
                reps.append(left)
            else:
                sibs = tree.children[par]
                reps.append(right if leaf == sibs[0] else left)
        rows = tuple(
            tuple(abs(reps[i] - reps[j]) for j in range(tree.n_points))
            for i in range(tree.n_points)
        )
        table = MetricTable(tree.points, rows)
        return cls(tree, table, "intervals", diams, tuple(hulls))


def cell_diameter(g: Geometry, c: int):
    return g.diam(c)


def cell_separation(g: Geometry, c1: int, c2: int):
    return g.separation(c1, c2)


@dataclass(frozen=True)
class BallCellVerdict:
    ok: bool
    cell_failures: tuple  # (cell id, center label) where ball(x, diam C) != C
    ball_failures: tuple  # (center label, radius, ball point labels) not a cell

    def __bool__(self):
        return self.ok


def critical_radii(table: MetricTable) -> list:
    """Realized positive distances plus midpoints of consecutive values.

    Every closed ball of positive radius equals a ball at one of these
    radii, so scanning them decides ball properties for all radii."""
    vals = sorted(
        {table.rows[i][j] for i in range(table.n) for j in range(i + 1, table.n)}
    )
    radii = []
    for k, v in enumerate(vals):
        radii.append(v)
        if k + 1 < len(vals):
            radii.append((v + vals[k + 1]) / 2)
    return radii


class _BallScanner:
    """Per-center sorted distance rows; balls answered by bisection."""

    def __init__(self, table: MetricTable):
        self.table = table
        self.sorted_rows = []
        self.orders = []
        for i in range(table.n):
            pairs = sorted(zip(table.rows[i], range(table.n)))
            self.sorted_rows.append([p[0] for p in pairs])
            self.orders.append([p[1] for p in pairs])

    def count_within(self, x: int, r) -> int:
        return bisect_right(self.sorted_rows[x], r)

    def ball(self, x: int, r) -> frozenset:
        return frozenset(self.orders[x][: self.count_within(x, r)])


def balls_equal_cells(tree: CellTree, m: MetricTable) -> BallCellVerdict:
    """Check both directions of the ball-cell correspondence.

    (a) for every cell C and every x in C, the closed ball around x with
        radius diam C equals C;
    (b) for every center and every critical radius, the closed ball is a
        cell.  Witnesses are reported in deterministic scan order.
    """
    if tuple(m.labels) != tuple(tree.points):
        raise PointSetMismatch("table labels differ from tree points")
    scanner = _BallScanner(m)
    # max distance from x to each of its ancestors, leaf upward
    chain_maxdist = {}
    for i in range(tree.n_points):
        node = tree.leaf_of[i]
        chain = [node] + tree.ancestors(node)
        row = m.rows[i]
        for c in chain:
            chain_maxdist[(i, c)] = max(row[j] for j in tree.members[c])
    cell_failures = []
    for c in tree.cells():
        diam = max(chain_maxdist[(i, c)] for i in tree.members[c])
        size = len(tree.members[c])
        for i in sorted(tree.members[c]):
            if scanner.count_within(i, diam) != size:
                cell_failures.append((c, tree.points[i]))
                break
        if cell_failures:
            break
    ball_failures = []
    radii = critical_radii(m)
    sizes_by_chain = {}
    for i in range(tree.n_points):
        node = tree.leaf_of[i]
        chain = [node] + tree.ancestors(node)
        sizes_by_chain[i] = {len(tree.members[c]): c for c in chain}
    for i in range(tree.n_points):
        for r in radii:
            cnt = scanner.count_within(i, r)
            cand = sizes_by_chain[i].get(cnt)
            if cand is None or chain_maxdist[(i, cand)] > r:
                ball = scanner.ball(i, r)
                ball_failures.append(
                    (tree.points[i], r, tuple(sorted(tree.points[j] for j in ball)))
                )
                break
        if ball_failures:
            break
    return BallCellVerdict(
        not cell_failures and not ball_failures,
        tuple(cell_failures),
        tuple(ball_failures),
    )


@dataclass(frozen=True)
class MonotonicityVerdict:
    ok: bool
    witness: tuple | None = None  # (parent id, child id, parent diam, child diam)

    def __bool__(self):
        return self.ok


def strict_diameter_monotonicity(tree: CellTree, g: Geometry) -> MonotonicityVerdict:
    """diam C' < diam C on every tree edge (child strictly smaller)."""
    for c in tree.cells():
        for ch in tree.children[c]:
            if not g.diam(ch) < g.diam(c):
                return MonotonicityVerdict(False, (c, ch, g.diam(c), g.diam(ch)))
    return MonotonicityVerdict(True)
