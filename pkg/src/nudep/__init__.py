"""nudep: dependence measurement and model-free variable selection.

The central object is a coefficient nu(Y, X) in [0, 1] that is 0 exactly
under independence and 1 exactly when Y is a function of X, estimated from
response ranks and covariate nearest neighbors in O(n log n).  On top of
it the package provides forward variable selection with a built-in
stopping rule (FORD), permutation and conjectured-asymptotic independence
tests with BH adjustment, population targets for benchmark models, an
induced discrepancy on permutations, and a seeded simulation harness.
"""

__version__ = "0.1.0"

from .coefficient import (
    CoefficientResult,
    WeightComparison,
    nu_1dim,
    nu_1dim_oracle,
    nu_general,
    nu_general_oracle,
    weight_comparison,
    x_sort_order,
    xi_coefficient,
)
from .errors import (
    DataError,
    DegenerateResponseError,
    InsufficientSampleError,
    InvalidInputError,
    NumericalError,
)
from .inference import (
    NullParams,
    PermutationTestResult,
    asymptotic_null_params,
    asymptotic_test,
    bh_adjust,
    permutation_test,
)
from .neighbors import NeighborTable, build_neighbor_table, resolve_excluded_neighbor
from .permdist import (
    CLASSICAL_METRICS,
    classical_metric,
    d_nu,
    d_nu_symmetric,
)
from .population import (
    PopulationTarget,
    nu_plug_in_mc,
    nu_product_uniform,
    product_uniform_integrand,
)
from .ranks import (
    RankInfo,
    WeightTable,
    build_weight_table,
    compute_ranks,
    weighted_rank_mass,
)
from .sample import Sample
from .selection import SelectionPath, ford_full_ordering, ford_select
from .simulation import (
    ExperimentReport,
    ModelSpec,
    figure1_study,
    generate,
    null_moment_study,
    power_study,
    runtime_study,
    selection_study,
)
from .util import DEFAULT_SEED

__all__ = [
    "CoefficientResult",
    "DataError",
    "DEFAULT_SEED",
    "DegenerateResponseError",
    "ExperimentReport",
    "InsufficientSampleError",
    "InvalidInputError",
    "ModelSpec",
    "NeighborTable",
    "NullParams",
    "NumericalError",
    "PermutationTestResult",
    "PopulationTarget",
    "RankInfo",
    "Sample",
    "SelectionPath",
    "WeightComparison",
    "WeightTable",
    "CLASSICAL_METRICS",
    "asymptotic_null_params",
    "asymptotic_test",
    "bh_adjust",
    "build_neighbor_table",
    "build_weight_table",
    "classical_metric",
    "compute_ranks",
    "d_nu",
    "d_nu_symmetric",
    "figure1_study",
    "ford_full_ordering",
    "ford_select",
    "generate",
    "null_moment_study",
    "nu_1dim",
    "nu_1dim_oracle",
    "nu_general",
    "nu_general_oracle",
    "nu_plug_in_mc",
    "nu_product_uniform",
    "permutation_test",
    "power_study",
    "product_uniform_integrand",
    "resolve_excluded_neighbor",
    "runtime_study",
    "selection_study",
    "weight_comparison",
    "weighted_rank_mass",
    "x_sort_order",
    "xi_coefficient",
]
