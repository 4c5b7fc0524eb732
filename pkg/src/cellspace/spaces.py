"""Constructors for canonical cellular spaces.

Products of finite alphabets, tree ray spaces, middle-thirds Cantor and fat
Cantor truncations with exact rational interval embeddings, and seeded random
laminar trees.  A depth-L truncation represents the infinite space exactly
for every pair of points separated before level L; deeper structure is
collapsed into the leaves.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .celltree import CellTree, RootedTree, cells_of
from .errors import BadAlphabetSize, BadProportion


@dataclass(frozen=True)
class ProductSpec:
    """Alphabet sizes per level of a finite product; every size must be >= 2."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes:
            raise BadAlphabetSize("a product needs at least one level")
        for n in self.sizes:
            if not isinstance(n, int) or n < 2:
                raise BadAlphabetSize(f"level size {n!r} is not an integer >= 2")

    @property
    def depth(self) -> int:
        return len(self.sizes)

    @property
    def n_points(self) -> int:
        out = 1
        for n in self.sizes:
            out *= n
        return out

    def labels(self) -> list[str]:
        """Coordinate strings in lexicographic order.

        Digits are concatenated while every alphabet fits in 0..9; larger
        alphabets fall back to dot-separated indices.
        """
        sep = "" if max(self.sizes) <= 10 else "."
        return [
            sep.join(str(c) for c in coords)
            for coords in iproduct(*(range(n) for n in self.sizes))
        ]


def product_space(spec: ProductSpec) -> CellTree:
    """Complete tree of the product cellular structure.

    Depth-l cells are exactly the sets of points sharing their first l
    coordinates; leaves are the coordinate strings.
    """
    labels = spec.labels()

    def node(prefix: tuple[int, ...]) -> RootedTree:
        level = len(prefix)
        if level == spec.depth:
            sep = "" if max(spec.sizes) <= 10 else "."
            return RootedTree(label=sep.join(str(c) for c in prefix))
        return RootedTree(
            children=[node(prefix + (c,)) for c in range(spec.sizes[level])]
        )

    tree = cells_of(node(()))
    assert tree.points == tuple(labels)
    return tree


def ray_space(tree: RootedTree) -> CellTree:
    """Cellular structure on the rays of a finite rooted tree.

    Rays of a finite tree correspond to its leaves; the cell of a vertex v
    is the set of rays passing through v.  Vertices with a single child
    determine the same ray set as that child and collapse to one cell.
    Unlabeled leaves are named by their root-to-leaf child-index path.
    """
    labeled = _with_ray_labels(tree, ())
    return cells_of(labeled)


def _with_ray_labels(node: RootedTree, path: tuple[int, ...]) -> RootedTree:
    if node.is_leaf():
        label = node.label
        if label is None:
            label = "r" + ".".join(str(i) for i in path) if path else "r"
        return RootedTree(label=label)
    return RootedTree(
        children=[
            _with_ray_labels(ch, path + (i,)) for i, ch in enumerate(node.children)
        ]
    )


def complete_tree(arity: int, depth: int) -> RootedTree:
    """Complete rooted tree where every vertex above the leaves has `arity`
    children; handy input for ray_space."""
    if arity < 1 or depth < 0:
        raise ValueError("need arity >= 1 and depth >= 0")

    def build(d: int) -> RootedTree:
        if d == 0:
            return RootedTree()
        return RootedTree(children=[build(d - 1) for _ in range(arity)])

    return build(depth)


@dataclass(frozen=True)
class IntervalEmbedding:
    """Exact per-leaf closed intervals on the line plus stage gap proportions.

    Leaf interval order agrees with leaf point order, intervals are pairwise
    disjoint, and a cell's hull is the convex span of its leaves' intervals.
    Facing gap endpoints belong to the limit set, so hull lengths and gap
    widths are the exact diameters and separations of the truncated cells.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...]
    thetas: tuple[Fraction, ...]

    def __post_init__(self):
        prev_right = None
        for left, right in self.intervals:
            if right < left:
                raise ValueError("interval with negative length")
            if prev_right is not None and left <= prev_right:
                raise ValueError("leaf intervals overlap or touch")
            prev_right = right


def _interval_tree(depth: int, thetas: list[Fraction]):
    """Binary interval construction: at stage n split each interval of
    length L into two of length (1 - theta_n) L / 2 separated by theta_n L."""
    intervals = [(Fraction(0), Fraction(1))]
    for th in thetas:
        nxt = []
        for a, b in intervals:
            length = b - a
            child = (1 - th) * length / 2
            nxt.append((a, a + child))
            nxt.append((b - child, b))
        intervals = nxt
    tree = product_space(ProductSpec(sizes=(2,) * depth))
    return tree, IntervalEmbedding(tuple(intervals), tuple(thetas))


def cantor(depth: int) -> tuple[CellTree, IntervalEmbedding]:
    """Middle-thirds Cantor construction truncated at the given depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return _interval_tree(depth, [Fraction(1, 3)] * depth)


def default_fat_thetas(depth: int) -> list[Fraction]:
    return [Fraction(1, 2 ** (n + 2)) for n in range(depth)]


def fat_cantor(depth: int, thetas=None) -> tuple[CellTree, IntervalEmbedding]:
    """Fat Cantor truncation: gap proportions shrink so the limit set keeps
    positive length.  Default schedule theta_n = 2^-(n+2)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if thetas is None:
        thetas = default_fat_thetas(depth)
    thetas = [Fraction(t) for t in thetas]
    if len(thetas) != depth:
        raise BadProportion(f"need {depth} stage proportions, got {len(thetas)}")
    for t in thetas:
        if not (0 < t < 1):
            raise BadProportion(f"gap proportion {t} outside (0, 1)")
    return _interval_tree(depth, thetas)


def random_laminar(
    seed: int, max_branch: int = 4, max_depth: int = 8, n_points: int = 16
) -> CellTree:
    """Seed-deterministic random laminar tree on points p0..p{n-1}.

    Every internal node gets between 2 and max_branch children, never deeper
    than max_depth.  The generator is random.Random(seed) (Mersenne Twister)
    consumed in document order: child count first, then child sizes left to
    right.
    """
    if max_branch < 2 or max_depth < 1 or n_points < 1:
        raise ValueError("need max_branch >= 2, max_depth >= 1, n_points >= 1")
    if max_branch**max_depth < n_points:
        raise ValueError(
            f"max_branch**max_depth = {max_branch**max_depth} < {n_points} points"
        )
    rng = random.Random(seed)
    labels = tuple(f"p{i}" for i in range(n_points))

    def split(lo: int, hi: int, levels_left: int) -> RootedTree:
        size = hi - lo
        if size == 1:
            return RootedTree(label=labels[lo])
        cap = max_branch ** (levels_left - 1)
        kmin = max(2, math.ceil(size / cap))
        kmax = min(max_branch, size)
        k = rng.randint(kmin, kmax)
        sizes = []
        rem = size
        for j in range(k):
            slots_after = k - j - 1
            lo_sz = max(1, rem - cap * slots_after)
            hi_sz = min(cap, rem - slots_after)
            s = rng.randint(lo_sz, hi_sz) if j < k - 1 else rem
            sizes.append(s)
            rem -= s
        kids = []
        at = lo
        for s in sizes:
            kids.append(split(at, at + s, levels_left - 1))
            at += s
        return RootedTree(children=kids)

    return cells_of(split(0, n_points, max_depth))
