"""Serialization: cellspace-v1 JSON, CSV metric tables, profile CSVs.

The cellspace-v1 tree format nests node objects {"children": [...]} with
leaves {"point": "label"}.  Internal nodes may carry "weight": "p/q"; leaves
may carry "measure": "p/q" and "interval": [left_num, left_den, right_num,
right_den].  Files wrap the root node as {"format": "cellspace-v1",
"generator": {...}?, "root": {...}}; a bare node object is also accepted.
A family form {"format": ..., "points": [...], "cells": [[indices], ...]}
feeds the validator directly.  All emitters are byte-deterministic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from .analysis import MeasureAtoms
from .celltree import CellTree, RootedTree, cells_of, validate_family
from .errors import FormatError
from .metrics import MetricTable, WeightFn
from .spaces import IntervalEmbedding

FORMAT_NAME = "cellspace-v1"


def frac_str(v: Fraction) -> str:
    return str(Fraction(v))


def parse_frac(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational {s!r}: {e}") from None


@dataclass
class LoadedSpace:
    tree: CellTree
    weights: WeightFn | None
    measure: MeasureAtoms | None
    embedding: IntervalEmbedding | None
    generator: dict | None


def space_to_obj(
    tree: CellTree,
    weights: WeightFn | None = None,
    measure: MeasureAtoms | None = None,
    embedding: IntervalEmbedding | None = None,
    generator: dict | None = None,
) -> dict:
    def node(c: int) -> dict:
        if tree.is_leaf(c):
            i = next(iter(tree.members[c]))
            out: dict = {"point": tree.points[i]}
            if embedding is not None:
                left, right = embedding.intervals[i]
                out["interval"] = [
                    left.numerator,
                    left.denominator,
                    right.numerator,
                    right.denominator,
                ]
            if measure is not None:
                out["measure"] = frac_str(measure.values[i])
            return out
        out = {"children": [node(k) for k in tree.children[c]]}
        if weights is not None:
            out["weight"] = frac_str(weights[c])
        return out

    obj: dict = {"format": FORMAT_NAME, "root": node(tree.ROOT)}
    if generator is not None:
        obj["generator"] = generator
    if embedding is not None:
        obj["thetas"] = [frac_str(t) for t in embedding.thetas]
    return obj


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def space_to_json(tree, **kwargs) -> str:
    return dumps(space_to_obj(tree, **kwargs))


def _parse_node(obj, path="root") -> RootedTree:
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: node must be an object")
    if "point" in obj:
        label = obj["point"]
        if not isinstance(label, str):
            raise FormatError(f"{path}: point label must be a string")
        node = RootedTree(label=label)
        node.payload = obj  # type: ignore[attr-defined]
        return node
    kids = obj.get("children")
    if not isinstance(kids, list) or not kids:
        raise FormatError(f"{path}: internal node needs a nonempty children list")
    node = RootedTree(
        children=[_parse_node(k, f"{path}.children[{i}]") for i, k in enumerate(kids)]
    )
    node.payload = obj  # type: ignore[attr-defined]
    return node


def load_space(text_or_obj, strict: bool = True) -> LoadedSpace:
    """Parse a cellspace-v1 document (tree form or family form)."""
    if isinstance(text_or_obj, str):
        try:
            obj = json.loads(text_or_obj)
        except json.JSONDecodeError as e:
            raise FormatError(f"not valid JSON: {e}") from None
    else:
        obj = text_or_obj
    if not isinstance(obj, dict):
        raise FormatError("document must be a JSON object")
    if obj.get("format", FORMAT_NAME) != FORMAT_NAME:
        raise FormatError(f"unknown format {obj.get('format')!r}")
    generator = obj.get("generator")
    if "points" in obj and "cells" in obj:
        try:
            points = [str(p) for p in obj["points"]]
            cells = [frozenset(int(i) for i in cell) for cell in obj["cells"]]
        except (TypeError, ValueError) as e:
            raise FormatError(f"bad family listing: {e}") from None
        tree = validate_family(points, cells, strict=strict)
        return LoadedSpace(tree, None, None, None, generator)
    root_obj = obj.get("root", obj if ("children" in obj or "point" in obj) else None)
    if root_obj is None:
        raise FormatError("document has neither a root node nor a family listing")
    rooted = _parse_node(root_obj)
    tree = cells_of(rooted)

    # collect per-node annotations keyed by point-index sets
    idx = {p: i for i, p in enumerate(tree.points)}
    weight_by_set: dict = {}
    leaf_payload: dict = {}

    def walk(node: RootedTree) -> frozenset:
        payload = node.payload  # type: ignore[attr-defined]
        if node.is_leaf():
            s = frozenset({idx[node.label]})
            leaf_payload[s] = payload
        else:
            s = frozenset().union(*(walk(k) for k in node.children))
        if "weight" in payload:
            w = parse_frac(payload["weight"])
            if weight_by_set.get(s, w) != w:
                raise FormatError(
                    f"conflicting weights for collapsed cell {sorted(s)}"
                )
            weight_by_set[s] = w
        return s

    walk(rooted)

    weights = None
    if weight_by_set:
        values = []
        for c in tree.cells():
            if tree.is_leaf(c):
                values.append(Fraction(0))
            else:
                w = weight_by_set.get(tree.members[c])
                if w is None:
                    raise FormatError(
                        f"internal cell {sorted(tree.members[c])} lacks a weight"
                    )
                values.append(w)
        weights = WeightFn(tree, tuple(values))

    measures = {}
    intervals = {}
    for s, payload in leaf_payload.items():
        i = next(iter(s))
        if "measure" in payload:
            measures[i] = parse_frac(payload["measure"])
        if "interval" in payload:
            quad = payload["interval"]
            if not (isinstance(quad, list) and len(quad) == 4):
                raise FormatError("interval must be [num, den, num, den]")
            intervals[i] = (
                Fraction(int(quad[0]), int(quad[1])),
                Fraction(int(quad[2]), int(quad[3])),
            )
    measure = None
    if measures:
        if len(measures) != tree.n_points:
            raise FormatError("either all leaves carry a measure or none")
        measure = MeasureAtoms(
            tree.points, tuple(measures[i] for i in range(tree.n_points))
        )
    embedding = None
    if intervals:
        if len(intervals) != tree.n_points:
            raise FormatError("either all leaves carry an interval or none")
        thetas = tuple(parse_frac(t) for t in obj.get("thetas", []))
        embedding = IntervalEmbedding(
            tuple(intervals[i] for i in range(tree.n_points)), thetas
        )
    return LoadedSpace(tree, weights, measure, embedding, generator)


# -- CSV ---------------------------------------------------------------------


def table_to_csv(table: MetricTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(table.labels))
    for i, label in enumerate(table.labels):
        row = [label]
        for v in table.rows[i]:
            row.append(frac_str(v) if table.exact else repr(v))
        w.writerow(row)
    return buf.getvalue()


def table_from_csv(text: str, exact: bool = True, tol: float = 0.0) -> MetricTable:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 2:
        raise FormatError("metric CSV needs a header row of labels")
    labels = tuple(rows[0][1:])
    if len(rows) != len(labels) + 1:
        raise FormatError(f"expected {len(labels)} data rows, got {len(rows) - 1}")
    out = []
    for i, row in enumerate(rows[1:]):
        if len(row) != len(labels) + 1:
            raise FormatError(f"row {i} has {len(row) - 1} entries")
        if row[0] != labels[i]:
            raise FormatError(f"row label {row[0]!r} != column label {labels[i]!r}")
        if exact:
            out.append(tuple(parse_frac(v) for v in row[1:]))
        else:
            out.append(tuple(float(v) for v in row[1:]))
    return MetricTable(labels, tuple(out), exact=exact, tol=tol)


def profile_to_csv(profile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "s", "count"])
    for r, s in profile.distinct():
        w.writerow([frac_str(r), frac_str(s), profile.pairs[(r, s)][0]])
    return buf.getvalue()


def envelope_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "H"])
    for t, h in points:
        w.writerow([frac_str(t), "" if h is None else frac_str(h)])
    return buf.getvalue()


def verdict_to_obj(verdict) -> dict:
    return {
        "pass": verdict.passed,
        "reason": verdict.reason,
        "depths": list(verdict.depths),
        "eta": [
            [frac_str(t), None if h is None else frac_str(h)] for t, h in verdict.eta
        ],
        "offending_t": None
        if verdict.offending_t is None
        else frac_str(verdict.offending_t),
        "witness": None if verdict.witness is None else list(verdict.witness),
    }
