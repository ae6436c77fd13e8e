"""qdlab: low-discrepancy point sets, exact discrepancy oracles, and the
bound/constant machinery attached to them.

The package splits into generation (`sequences`), exact critical-grid
oracles (`exact`), closed-form bounds (`bounds`), tractability constants
(`constants`), and shared plumbing (`core`).  `report`/`cli` tie them into
sweeps, delimited output, and figures.
"""

from .bounds import (
    BOUND_KINDS,
    BoundModel,
    delta_star,
    delta_star_from_log,
    ell_star,
    ell_star_residual,
    halton_weighted_bound_final,
    lambert_w,
    lambert_w_residual,
    min_improved_weighted_bound,
    projection_bound,
    six_j_domination,
    solve_power_equation,
    weighted_bound_max,
    weighted_bound_product,
)
from .constants import (
    CDeltaReport,
    StirlingMaxRatio,
    bound_chain_check,
    c_delta_alt,
    c_delta_hn,
    c_delta_table,
    c_delta_table_grid,
    n_min,
    sigma_w,
    stirling_max_ratio,
    w_lower_example,
)
from .core import (
    BudgetError,
    LogValue,
    PrimeBases,
    WeightFamily,
    first_primes,
    max_nonempty_subset_product,
    max_subset_jgamma,
    nonempty_subsets,
    normalize_subset,
    partial_sum_jgamma,
    subset_weight,
    weight_at,
)
from .exact import (
    AnchoredBox,
    Box,
    DiscrepancyResult,
    evaluate_witness,
    local_discrepancy,
    star_discrepancy_exact,
    subset_contributions,
    unanchored_discrepancy_exact,
    weighted_star_discrepancy_exact,
    weighted_unanchored_discrepancy_exact,
)
from .sequences import (
    PointSet,
    halton_block_extend,
    halton_points,
    halton_points_incremental,
    project,
    radical_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "AnchoredBox",
    "BOUND_KINDS",
    "Box",
    "BoundModel",
    "BudgetError",
    "CDeltaReport",
    "DiscrepancyResult",
    "LogValue",
    "PointSet",
    "PrimeBases",
    "StirlingMaxRatio",
    "WeightFamily",
    "bound_chain_check",
    "c_delta_alt",
    "c_delta_hn",
    "c_delta_table",
    "c_delta_table_grid",
    "delta_star",
    "delta_star_from_log",
    "ell_star",
    "ell_star_residual",
    "evaluate_witness",
    "first_primes",
    "halton_block_extend",
    "halton_points",
    "halton_points_incremental",
    "halton_weighted_bound_final",
    "lambert_w",
    "lambert_w_residual",
    "local_discrepancy",
    "max_nonempty_subset_product",
    "max_subset_jgamma",
    "min_improved_weighted_bound",
    "n_min",
    "nonempty_subsets",
    "normalize_subset",
    "partial_sum_jgamma",
    "project",
    "projection_bound",
    "radical_inverse",
    "sigma_w",
    "six_j_domination",
    "solve_power_equation",
    "star_discrepancy_exact",
    "stirling_max_ratio",
    "subset_contributions",
    "subset_weight",
    "unanchored_discrepancy_exact",
    "w_lower_example",
    "weight_at",
    "weighted_bound_max",
    "weighted_bound_product",
    "weighted_star_discrepancy_exact",
    "weighted_unanchored_discrepancy_exact",
    "__version__",
]
