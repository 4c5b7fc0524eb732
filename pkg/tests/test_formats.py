"""Serialization round trips and malformed-input handling."""

from fractions import Fraction as F

import pytest

from cellspace import (
    Geometry,
    MeasureAtoms,
    ProductSpec,
    cantor,
    distortion_profile,
    fat_cantor,
    product_space,
    synthesize_regular_weight,
    ultrametric_from_weight,
    weight_from_sequence,
)
from cellspace.errors import FormatError
from cellspace.formats import (
    dumps,
    envelope_to_csv,
    load_space,
    profile_to_csv,
    space_to_json,
    table_from_csv,
    table_to_csv,
)


def test_tree_round_trip():
    t = product_space(ProductSpec((2, 3)))
    loaded = load_space(space_to_json(t))
    assert loaded.tree == t
    assert loaded.weights is None and loaded.measure is None


def test_weights_round_trip():
    t = product_space(ProductSpec((2, 2)))
    w = weight_from_sequence(t, [F(1), F(1, 2), F(1, 4)])
    loaded = load_space(space_to_json(t, weights=w))
    assert loaded.weights is not None
    assert loaded.weights.values == w.values


def test_measure_and_interval_round_trip():
    tree, emb = fat_cantor(2)
    mu = MeasureAtoms.uniform(tree)
    text = space_to_json(tree, measure=mu, embedding=emb, generator={"kind": "fat-cantor", "depth": 2, "thetas": None})
    loaded = load_space(text)
    assert loaded.measure.values == mu.values
    assert loaded.embedding.intervals == emb.intervals
    assert loaded.embedding.thetas == emb.thetas
    assert loaded.generator["kind"] == "fat-cantor"


def test_bare_node_accepted():
    obj = {
        "children": [
            {"point": "a"},
            {"children": [{"point": "b"}, {"point": "c"}]},
        ]
    }
    loaded = load_space(obj)
    assert loaded.tree.n_points == 3


def test_family_form():
    obj = {
        "format": "cellspace-v1",
        "points": ["x", "y", "z"],
        "cells": [[0, 1, 2], [0, 1], [0], [1], [2]],
    }
    loaded = load_space(obj)
    assert loaded.tree.n_cells == 5


def test_malformed_inputs():
    with pytest.raises(FormatError):
        load_space("{not json")
    with pytest.raises(FormatError):
        load_space({"format": "cellspace-v2", "root": {"point": "a"}})
    with pytest.raises(FormatError):
        load_space({"root": {"children": []}})
    with pytest.raises(FormatError):
        load_space({"root": {"point": 7}})
    with pytest.raises(FormatError):
        load_space(
            {
                "root": {
                    "children": [
                        {"point": "a", "measure": "1/2"},
                        {"point": "b"},
                    ]
                }
            }
        )


def test_deterministic_dump():
    t = product_space(ProductSpec((2, 2)))
    assert space_to_json(t) == space_to_json(t)
    assert dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}\n'


def test_table_csv_round_trip():
    t = product_space(ProductSpec((2, 2)))
    m = ultrametric_from_weight(t, weight_from_sequence(t, [F(1), F(1, 3), F(1, 9)]))
    text = table_to_csv(m)
    back = table_from_csv(text)
    assert back == m


def test_table_csv_float_mode():
    text = ",a,b\na,0,0.5\nb,0.5,0\n"
    m = table_from_csv(text, exact=False, tol=1e-9)
    assert not m.exact
    assert m.d(0, 1) == 0.5
    exact = table_from_csv(text)
    assert exact.d(0, 1) == F(1, 2)


def test_table_csv_errors():
    with pytest.raises(FormatError):
        table_from_csv("a,b\n")
    with pytest.raises(FormatError):
        table_from_csv(",a,b\na,0,1\n")
    with pytest.raises(FormatError):
        table_from_csv(",a,b\nz,0,1\nb,1,0\n")


def test_profile_and_envelope_csv():
    t = product_space(ProductSpec((2, 2)))
    d = ultrametric_from_weight(t, weight_from_sequence(t, [F(1), F(1, 2), F(1, 4)]))
    dt = ultrametric_from_weight(t, weight_from_sequence(t, [F(1), F(1, 3), F(1, 9)]))
    p = distortion_profile(d, dt)
    text = profile_to_csv(p)
    assert text.splitlines()[0] == "r,s,count"
    assert any(line.startswith("1/2,1/3,") for line in text.splitlines())
    env = envelope_to_csv([(F(1, 8), None), (F(1, 2), F(1, 3))])
    assert env == "t,H\n1/8,\n1/2,1/3\n"


def test_interval_geometry_from_loaded_file():
    tree, emb = cantor(3)
    loaded = load_space(space_to_json(tree, embedding=emb))
    g1 = Geometry.from_intervals(tree, emb)
    g2 = Geometry.from_intervals(loaded.tree, loaded.embedding)
    assert g1.table == g2.table


def test_synthesized_weight_round_trip():
    tree, _ = cantor(2)
    w = synthesize_regular_weight(tree, F(1, 2))
    loaded = load_space(space_to_json(tree, weights=w))
    assert ultrametric_from_weight(loaded.tree, loaded.weights) == ultrametric_from_weight(tree, w)
