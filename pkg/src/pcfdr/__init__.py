"""Multiple testing of partial conjunction hypotheses with (weighted) FDR
control, replicability analysis for meta-analysis, and a Monte Carlo
verification harness."""

from .combine import (
    BONFERRONI,
    DEFAULT_LAMBDA,
    FISHER,
    HOMMEL,
    SIMES,
    STOUFFER,
    CombiningMethod,
    bonferroni_combine,
    combine_pvalues,
    fisher_combine,
    hommel_combine,
    simes_combine,
    simes_storey,
    simes_storey_combine,
    storey_pi0,
    stouffer_combine,
)
from .numerics import chi_square_survival, std_normal_cdf, std_normal_quantile
from .partial_conjunction import pc_pvalue, pc_pvalue_oracle, pc_storey_pvalue
from .pc_testing import (
    GroupLayout,
    WeightScheme,
    compute_pc_pvalues,
    realized_weighted_fdp,
    test_pc_family,
)
from .procedures import (
    IDENTITY,
    RECIPROCAL_SUM,
    RejectionSet,
    ShapeFunction,
    ThresholdCollection,
    adaptive_step_up_storey,
    adjusted_pvalues,
    check_self_consistency,
    check_stability,
    step_up,
    weighted_volume,
)
from .replicability import (
    ReplicabilityReport,
    SelectionRule,
    khat_bounds,
    realized_replicability_error,
    select_features,
)
from .simulation import (
    McEstimate,
    SimulationScenario,
    dcc_probe,
    gen_meta_matrix,
    mc_fdr_pc,
    mc_replicability_error,
)

__version__ = "0.1.0"
