"""Inhomogeneous attractor kit: dimensions and Hausdorff measure for IFS.

The package builds attractors of contracting map systems with an optional
condensation set, estimates their dimensions four ways (similarity,
affinity in the ≤ 1 regime, upper Lipschitz via pressure roots, upper box
via grid counting), and classifies the Hausdorff measure at a critical
exponent. The ``iak`` command line exposes the same operations on JSON
scene files.
"""

from .boxcount import (
    BoxCountSeries,
    BoxDimEstimate,
    Ladder,
    TheoremBoundsReport,
    box_count_series,
    box_dimension_fit,
    count_boxes,
    fit_series,
    fit_tail,
    verify_theorem_bounds,
)
from .clouds import (
    homogeneous_points,
    inhomogeneous_points,
    orbital_points,
    orbital_points_adaptive,
)
from .condensation import (
    AxisBox,
    BitmapCloud,
    CondensationSet,
    Disk,
    FinitePoints,
    Segment,
    bounds_of,
    box_dim_of,
    diameter_of,
    measure_at,
    sample_points,
    sample_with_spacing,
)
from .errors import (
    BudgetExceeded,
    EmptyInput,
    IAKError,
    InvalidInput,
    InvalidWord,
    NoPointAction,
    NotFullDimensional,
    SceneError,
    SeriesDiverges,
    WrongVariant,
)
from .maps import (
    AbstractLipschitz,
    Affine,
    ComposedMap,
    ContractionMap,
    IFSystem,
    Similarity,
    Word,
    apply,
    compose,
    fixed_point,
    iterate_system,
    parse_word,
    word_str,
    words_of_length,
)
from .measure import (
    MeasureReport,
    OrbitalRatio,
    SeriesBounds,
    classify,
    closed_form_self_similar,
    critical_exponent,
    orbital_measure_ratio_empirical,
    series_bounds,
)
from .pressure import (
    DimensionReport,
    PressureEvaluation,
    affinity_dimension_le1,
    distortion_ratio,
    lower_lipschitz_root,
    partition_sum,
    pressure_eval,
    similarity_dimension,
    solve_s_k,
    upper_lipschitz_dimension,
)
from .raster import (
    attractor_grid,
    condensation_grid,
    inhomogeneous_grid,
    orbital_grid,
    rasterize_cloud,
    write_pgm,
)
from .scene import (
    Scene,
    bundled_scene_names,
    load_bundled_scene,
    load_scene,
    scene_from_dict,
)
from .stopping import (
    CardinalityCheck,
    DeltaStopping,
    b_t_constant,
    check_cardinality_bound,
    check_inclusion,
    delta_stopping,
    walk_stopping,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractLipschitz",
    "Affine",
    "AxisBox",
    "BitmapCloud",
    "BoxCountSeries",
    "BoxDimEstimate",
    "BudgetExceeded",
    "CardinalityCheck",
    "ComposedMap",
    "CondensationSet",
    "ContractionMap",
    "DeltaStopping",
    "DimensionReport",
    "Disk",
    "EmptyInput",
    "FinitePoints",
    "IAKError",
    "IFSystem",
    "InvalidInput",
    "InvalidWord",
    "Ladder",
    "MeasureReport",
    "NoPointAction",
    "NotFullDimensional",
    "OrbitalRatio",
    "PressureEvaluation",
    "Scene",
    "SceneError",
    "Segment",
    "SeriesBounds",
    "SeriesDiverges",
    "Similarity",
    "TheoremBoundsReport",
    "Word",
    "WrongVariant",
    "affinity_dimension_le1",
    "apply",
    "attractor_grid",
    "b_t_constant",
    "bounds_of",
    "box_count_series",
    "box_dim_of",
    "box_dimension_fit",
    "bundled_scene_names",
    "check_cardinality_bound",
    "check_inclusion",
    "classify",
    "closed_form_self_similar",
    "compose",
    "condensation_grid",
    "count_boxes",
    "critical_exponent",
    "delta_stopping",
    "diameter_of",
    "distortion_ratio",
    "fit_series",
    "fit_tail",
    "fixed_point",
    "homogeneous_points",
    "inhomogeneous_grid",
    "inhomogeneous_points",
    "iterate_system",
    "load_bundled_scene",
    "load_scene",
    "lower_lipschitz_root",
    "measure_at",
    "orbital_grid",
    "orbital_measure_ratio_empirical",
    "orbital_points",
    "orbital_points_adaptive",
    "parse_word",
    "partition_sum",
    "pressure_eval",
    "rasterize_cloud",
    "sample_points",
    "sample_with_spacing",
    "scene_from_dict",
    "series_bounds",
    "similarity_dimension",
    "solve_s_k",
    "upper_lipschitz_dimension",
    "verify_theorem_bounds",
    "walk_stopping",
    "word_str",
    "words_of_length",
    "write_pgm",
]
