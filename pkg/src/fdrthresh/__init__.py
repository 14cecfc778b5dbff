"""FDR thresholding as classification under sparsity.

Public API is re-exported here; see the module docstrings for the math.
"""

from .cli import GridConfig, run_grid
from .exceptions import (
    CalibrationError,
    CapacityError,
    DomainError,
    FdrThreshError,
    LevelError,
    RangeError,
    SolverError,
)
from .model import (
    CanonicalParams,
    Kind,
    ModelSpec,
    calibrate,
    location_model,
    scale_model,
)
from .risk import (
    BoundParams,
    EXACT_RISK_CAP,
    RiskReport,
    bfdr_excess_bound,
    bfdr_ratio_floor,
    exact_fdr_risk,
    excess,
    explicit_excess_bound,
    fdr_excess_bound,
    rates,
    rejection_count_distribution,
    rho_rate,
    risk_det,
    risk_weighted,
    steck_prefix,
    steck_prefix_log,
    weighted_bayes_threshold,
)
from .simulate import (
    ConcentrationProfile,
    McEstimate,
    RiskKind,
    SimConfig,
    concentration_profile,
    empirical_fdp,
    fdr_rule,
    mc_risk,
    sample_dataset,
)
from .subbotin import SubbotinShape
from .threshold import (
    Family,
    LevelChoice,
    Provenance,
    ThresholdResult,
    alpha_opt,
    bayes_threshold,
    bfdr_of,
    bfdr_threshold,
    bh_threshold,
    fdr_threshold,
    fdr_threshold_stats,
    pvalues_from_stats,
    q_opt,
    statistic_scale,
)

__all__ = [
    "BoundParams",
    "CalibrationError",
    "CanonicalParams",
    "CapacityError",
    "ConcentrationProfile",
    "DomainError",
    "EXACT_RISK_CAP",
    "Family",
    "FdrThreshError",
    "GridConfig",
    "Kind",
    "LevelChoice",
    "LevelError",
    "McEstimate",
    "ModelSpec",
    "Provenance",
    "RangeError",
    "RiskKind",
    "RiskReport",
    "SimConfig",
    "SolverError",
    "SubbotinShape",
    "ThresholdResult",
    "alpha_opt",
    "bayes_threshold",
    "bfdr_excess_bound",
    "bfdr_of",
    "bfdr_ratio_floor",
    "bfdr_threshold",
    "bh_threshold",
    "calibrate",
    "concentration_profile",
    "empirical_fdp",
    "exact_fdr_risk",
    "excess",
    "explicit_excess_bound",
    "fdr_excess_bound",
    "fdr_rule",
    "fdr_threshold",
    "fdr_threshold_stats",
    "location_model",
    "mc_risk",
    "pvalues_from_stats",
    "q_opt",
    "rates",
    "rejection_count_distribution",
    "rho_rate",
    "risk_det",
    "risk_weighted",
    "run_grid",
    "sample_dataset",
    "scale_model",
    "statistic_scale",
    "steck_prefix",
    "steck_prefix_log",
    "weighted_bayes_threshold",
]

__version__ = "0.1.0"
