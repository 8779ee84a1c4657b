"""Canonical measures on metric graphs and their degenerations.

The package computes the canonical (tree-weighted) measure of a metric
graph in three independent formulations, decomposes layered graphs into
graded minors, follows measures and period matrices along degenerating
families, and ships a CLI plus seeded self tests on top of it all.
Everything outside the period module is exact rational arithmetic.
"""

from .degeneration import (
    CROSS_LAYER,
    WITHIN_LAYER,
    ConvergenceDiagnostics,
    ConvergenceFailure,
    ConvergenceReport,
    LengthFamily,
    NormalizedTestFunction,
    ProbeReport,
    all_tree_limits,
    check_convergence,
    continuity_probe,
    layered_tree_weight,
    limit_foster,
    omega_infinity,
)
from .documents import (
    GraphDocument,
    document_to_data,
    dump_report,
    exact_field,
    float_field,
    load_document,
    measure_section,
    parse_document,
    parse_rational,
    render_table,
    serialize_document,
)
from .errors import (
    BasisError,
    CanmeasError,
    DisconnectedGraph,
    DocumentError,
    FamilyError,
    InvalidGraph,
    LayeringError,
    MissingSection,
    NotPositiveDefinite,
    InvalidTestFunction,
    UnknownEdge,
    UnknownVertex,
)
from .families import ScaleFunction, geometric_grid, parse_scale, ratio_limit
from .graphs import (
    AugmentedGraph,
    CycleVector,
    SpanningTree,
    canonical_spanning_forest,
    connected_components,
    contract,
    contract_set,
    cycle_basis,
    delete,
    fundamental_cycles,
    graph_genus,
    is_bridge,
    is_connected,
    is_stable,
    spanning_trees,
    total_genus,
)
from .kirchhoff import effective_resistance, tree_count
from .layerings import (
    AdmissibleBasis,
    GradedMinorReport,
    OrderedPartition,
    admissible_cycle_basis,
    genus_decomposition,
    graded_minors,
    layered_spanning_trees,
    refines,
    to_filtration,
)
from .measures import (
    EdgeMeasure,
    GramMatrix,
    MetricGraph,
    PiecewiseLinear,
    TropicalCurve,
    foster_by_matrix,
    foster_by_projection,
    foster_by_trees,
    gram_matrices,
    hybrid_mass_profile,
    integrate,
    tropical_canonical_measure,
)
from .periods import (
    BlockScaleProfile,
    GradedLimitReport,
    InverseLemmaReport,
    ModelPeriodFamily,
    MonodromySet,
    NoiseSpec,
    assemble_base,
    graded_inverse_limits,
    layer_matrix,
    model_period,
    monodromy_from_basis,
    schur_block_inverse,
    verify_inverse_lemma,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleBasis",
    "AugmentedGraph",
    "BasisError",
    "BlockScaleProfile",
    "CanmeasError",
    "ConvergenceDiagnostics",
    "ConvergenceFailure",
    "ConvergenceReport",
    "CROSS_LAYER",
    "CycleVector",
    "DisconnectedGraph",
    "DocumentError",
    "EdgeMeasure",
    "FamilyError",
    "GradedLimitReport",
    "GradedMinorReport",
    "GramMatrix",
    "GraphDocument",
    "InverseLemmaReport",
    "InvalidGraph",
    "LayeringError",
    "LengthFamily",
    "MetricGraph",
    "MissingSection",
    "ModelPeriodFamily",
    "MonodromySet",
    "NoiseSpec",
    "NormalizedTestFunction",
    "NotPositiveDefinite",
    "OrderedPartition",
    "PiecewiseLinear",
    "ProbeReport",
    "ScaleFunction",
    "SpanningTree",
    "InvalidTestFunction",
    "TropicalCurve",
    "UnknownEdge",
    "UnknownVertex",
    "WITHIN_LAYER",
    "all_tree_limits",
    "admissible_cycle_basis",
    "assemble_base",
    "canonical_spanning_forest",
    "check_convergence",
    "connected_components",
    "continuity_probe",
    "contract",
    "contract_set",
    "cycle_basis",
    "delete",
    "document_to_data",
    "dump_report",
    "exact_field",
    "float_field",
    "effective_resistance",
    "foster_by_matrix",
    "foster_by_projection",
    "foster_by_trees",
    "fundamental_cycles",
    "genus_decomposition",
    "geometric_grid",
    "graded_inverse_limits",
    "graded_minors",
    "gram_matrices",
    "graph_genus",
    "hybrid_mass_profile",
    "integrate",
    "is_bridge",
    "is_connected",
    "is_stable",
    "layer_matrix",
    "layered_spanning_trees",
    "layered_tree_weight",
    "limit_foster",
    "load_document",
    "measure_section",
    "model_period",
    "monodromy_from_basis",
    "omega_infinity",
    "parse_document",
    "parse_rational",
    "parse_scale",
    "ratio_limit",
    "refines",
    "render_table",
    "schur_block_inverse",
    "serialize_document",
    "spanning_trees",
    "to_filtration",
    "total_genus",
    "tree_count",
    "tropical_canonical_measure",
    "verify_inverse_lemma",
]
