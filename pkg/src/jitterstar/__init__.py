"""Jittered vs simple random sampling under the star discrepancy."""
from .analysis import (
    VarianceComparison,
    bernstein_tail_bound,
    bound_constants,
    bound_exponent_A,
    high_prob_discrepancy_bound,
    high_prob_discrepancy_bound_sharp,
    log_union_tail_bound,
    simple_count_variance,
    stratified_count_variance,
    union_tail_bound,
    variance_comparison,
)
from .discrepancy import (
    DeltaCover,
    DiscrepancyResult,
    build_delta_cover,
    cover_cardinality_bound,
    cover_discrepancy,
    exact_star_discrepancy,
    local_discrepancy,
    star_discrepancy,
)
from .errors import DomainError, ResourceGuardError
from .experiment import (
    ExperimentResult,
    RunConfig,
    compare_samplers,
    estimate_expected_discrepancy,
    run_experiment,
    tail_integral_expectation,
)
from .geometry import (
    AnchoredBox,
    BoxDecomposition,
    GridPartition,
    boundary_cell_count,
    cell_box_intersection_volume,
    cell_index,
    decompose_box,
)
from .samplers import PointSet, RandomStream, derive_stream, jittered, simple_random

__version__ = "0.1.0"
