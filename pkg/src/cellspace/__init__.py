"""Finite cellular spaces: laminar cell trees, synthesized ultrametrics,
doubling and regularity constants, and quasisymmetric distortion envelopes."""

from .analysis import (
    DoublingResult,
    MeasureAtoms,
    RegularityReport,
    cell_doubling_constant,
    measure_cell_doubling,
    measure_metric_doubling,
    metric_doubling_constant,
    metric_regularity,
    product_measure,
    sequence_regularity,
    synthesize_regular_weight,
)
from .celltree import CellTree, RootedTree, cells_of, validate_family
from .metrics import (
    Geometry,
    MetricTable,
    WeightFn,
    balls_equal_cells,
    cell_diameter,
    cell_separation,
    critical_radii,
    strict_diameter_monotonicity,
    ultrametric_from_weight,
    validate_ultrametric,
    weight_from_sequence,
)
from .quasisym import (
    DistortionProfile,
    QsVerdict,
    distortion_profile,
    envelope_eval,
    qs_verdict,
)
from .spaces import (
    IntervalEmbedding,
    ProductSpec,
    cantor,
    complete_tree,
    fat_cantor,
    product_space,
    random_laminar,
    ray_space,
)

__version__ = "0.1.0"

__all__ = [
    "CellTree",
    "RootedTree",
    "cells_of",
    "validate_family",
    "ProductSpec",
    "IntervalEmbedding",
    "product_space",
    "ray_space",
    "complete_tree",
    "cantor",
    "fat_cantor",
    "random_laminar",
    "MetricTable",
    "WeightFn",
    "Geometry",
    "weight_from_sequence",
    "ultrametric_from_weight",
    "validate_ultrametric",
    "cell_diameter",
    "cell_separation",
    "critical_radii",
    "balls_equal_cells",
    "strict_diameter_monotonicity",
    "MeasureAtoms",
    "RegularityReport",
    "DoublingResult",
    "cell_doubling_constant",
    "measure_cell_doubling",
    "product_measure",
    "metric_doubling_constant",
    "measure_metric_doubling",
    "sequence_regularity",
    "metric_regularity",
    "synthesize_regular_weight",
    "DistortionProfile",
    "QsVerdict",
    "distortion_profile",
    "envelope_eval",
    "qs_verdict",
    "__version__",
]
