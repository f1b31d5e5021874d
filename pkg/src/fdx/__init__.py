"""Step-down multiple testing with false discovery exceedance control.

The package implements step-down procedures guaranteeing
``P(FDP > alpha) <= zeta`` for heterogeneous null distributions: the
classical linear (lr) and binomial (gr) transforms, their heterogeneous
generalizations (hlr, hgr, pb), weighted variants, and discrete
instantiations driven by Fisher exact test support CDFs.
"""
from .distributions import (
    CdfFamily,
    StepCdf,
    Uniform,
    WeightedAM,
    WeightedGM,
    binom_tail,
    binom_tail_invert,
    pbin_tail,
    tilde_F,
    top_j_sum,
)
from .fisher import (
    FisherMargins,
    FisherTable,
    fisher_pvalue,
    fisher_support_cdf,
    hypergeom_pmf,
)
from .simharness import (
    SIM_PROCEDURES,
    FdxEstimate,
    ProcedureTrials,
    PValueModel,
    ScenarioResult,
    SimConfig,
    benjamini_hochberg,
    fisher_null_model,
    gm_weighted_null_model,
    mc_fdx_oracle,
    study_grid,
    run_scenario,
    uniform_null_model,
)
from .stepdown import (
    CriticalValues,
    RejectionResult,
    adjusted_pvalues,
    critical_values,
    reject,
    stepdown_explicit,
)
from .transforms import (
    KINDS,
    ProcedureSpec,
    TransformFamily,
    floor_alpha_ell,
    m_of_ell,
    make_transform,
    xi_pointwise_dominates,
)
from .weighting import (
    WeightProfile,
    weighted_pvalues_am,
    weighted_pvalues_gm,
    wgr_gm_critical_values,
    wlr_am_critical_values,
)

__version__ = "0.1.0"

__all__ = [
    "CdfFamily",
    "StepCdf",
    "Uniform",
    "WeightedAM",
    "WeightedGM",
    "binom_tail",
    "binom_tail_invert",
    "pbin_tail",
    "tilde_F",
    "top_j_sum",
    "FisherMargins",
    "FisherTable",
    "fisher_pvalue",
    "fisher_support_cdf",
    "hypergeom_pmf",
    "SimConfig",
    "benjamini_hochberg",
    "mc_fdx_oracle",
    "run_scenario",
    "uniform_null_model",
    "study_grid",
    "gm_weighted_null_model",
    "fisher_null_model",
    "ScenarioResult",
    "PValueModel",
    "ProcedureTrials",
    "FdxEstimate",
    "SIM_PROCEDURES",
    "CriticalValues",
    "RejectionResult",
    "adjusted_pvalues",
    "critical_values",
    "reject",
    "stepdown_explicit",
    "KINDS",
    "ProcedureSpec",
    "TransformFamily",
    "floor_alpha_ell",
    "m_of_ell",
    "make_transform",
    "xi_pointwise_dominates",
    "WeightProfile",
    "weighted_pvalues_am",
    "weighted_pvalues_gm",
    "wgr_gm_critical_values",
    "wlr_am_critical_values",
    "__version__",
]
