"""Numerical geometry of bounded- and fixed-rank correlation matrices.

Correlation matrices of rank at most k are Gram matrices of unit-row m x k
factors, unique up to a common rotation of the rows. The package computes
with that quotient of a product of spheres: distances and alignments,
exponential and logarithm maps, horizontal/vertical splittings, weighted
Frechet means, and a time-series pipeline built on top.
"""

from .config import DEFAULT_CONFIG, SolverConfig, SolverReport
from .corr import (
    CorrelationMatrix,
    CorrTolerances,
    as_correlation,
    factorize,
    gram,
    validate,
)
from .errors import (
    AlignmentStagnation,
    AntipodalLogarithm,
    CorrGeoError,
    DegenerateInput,
    EmptyFile,
    InvalidCorrelation,
    InvalidInput,
    ParseError,
    RankExceedsK,
    RetractionFailure,
    SingularSylvester,
)
from .fixed_rank import (
    HorizontalTangent,
    horizontal_project,
    lift_gradient,
    quotient_metric,
    vertical_project,
)
from .frechet import MeanReport, WeightedSampleSet, frechet_mean, frechet_variance
from .kernels import (
    RankTolerance,
    SymEig,
    numerical_rank,
    procrustes,
    qf,
    random_orthogonal,
    skew_part,
    sylvester_spd,
    sym_eig,
)
from .oracle import GridSpec, exhaustive_small_frechet, fd_gradient, o2_grid_distance
from .orthogonal_group import check_orthogonal, og_armijo, og_project, og_retract
from .pipeline import (
    CohortManifest,
    DiffReport,
    DistanceRun,
    DropPolicy,
    GroupMean,
    PairReport,
    SubjectSpec,
    TimeSeriesTable,
    correlation_of,
    difference_report,
    group_means,
    ingest,
    load_cohort,
    load_manifest,
    pairwise_distances,
    read_factor_csv,
    read_matrix_csv,
    write_factor_csv,
    write_matrix_csv,
    write_run_report,
)
from .product_sphere import (
    ProductTangent,
    check_unit_rows,
    ps_dist,
    ps_exp,
    ps_frechet_fixed,
    ps_log,
    ps_metric,
    ps_project,
    unit_rows,
)
from .quotient_space import (
    AlignmentResult,
    GeodesicSegment,
    OrbitPoint,
    align,
    as_orbit,
    geodesic_rank_profile,
    horizontality_defect,
    k_embedding,
    max_full_rank_interval,
    orbit_dist,
    orbit_equal,
    orbit_exp,
    orbit_log,
)
from .sphere import (
    great_circle_angle,
    sphere_dist,
    sphere_exp,
    sphere_log,
    sphere_project,
    sphere_retract,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AlignmentStagnation",
    "AntipodalLogarithm",
    "CohortManifest",
    "CorrGeoError",
    "CorrTolerances",
    "CorrelationMatrix",
    "DEFAULT_CONFIG",
    "DegenerateInput",
    "DiffReport",
    "DistanceRun",
    "DropPolicy",
    "EmptyFile",
    "GeodesicSegment",
    "GridSpec",
    "GroupMean",
    "HorizontalTangent",
    "InvalidCorrelation",
    "InvalidInput",
    "MeanReport",
    "OrbitPoint",
    "PairReport",
    "ParseError",
    "ProductTangent",
    "RankExceedsK",
    "RankTolerance",
    "RetractionFailure",
    "SingularSylvester",
    "SolverConfig",
    "SolverReport",
    "SubjectSpec",
    "SymEig",
    "TimeSeriesTable",
    "WeightedSampleSet",
    "align",
    "as_correlation",
    "as_orbit",
    "check_orthogonal",
    "check_unit_rows",
    "correlation_of",
    "difference_report",
    "exhaustive_small_frechet",
    "factorize",
    "fd_gradient",
    "frechet_mean",
    "frechet_variance",
    "geodesic_rank_profile",
    "gram",
    "group_means",
    "great_circle_angle",
    "horizontal_project",
    "horizontality_defect",
    "ingest",
    "k_embedding",
    "lift_gradient",
    "load_cohort",
    "load_manifest",
    "max_full_rank_interval",
    "numerical_rank",
    "o2_grid_distance",
    "og_armijo",
    "og_project",
    "og_retract",
    "orbit_dist",
    "orbit_equal",
    "orbit_exp",
    "orbit_log",
    "pairwise_distances",
    "procrustes",
    "ps_dist",
    "ps_exp",
    "ps_frechet_fixed",
    "ps_log",
    "ps_metric",
    "ps_project",
    "qf",
    "quotient_metric",
    "random_orthogonal",
    "read_factor_csv",
    "read_matrix_csv",
    "skew_part",
    "sphere_dist",
    "sphere_exp",
    "sphere_log",
    "sphere_project",
    "sphere_retract",
    "sylvester_spd",
    "sym_eig",
    "unit_rows",
    "validate",
    "vertical_project",
    "write_factor_csv",
    "write_matrix_csv",
    "write_run_report",
]
