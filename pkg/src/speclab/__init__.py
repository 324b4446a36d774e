"""Verifiable laboratory for spectrum-aware matrix optimizers."""

from .data import (
    DataModelSpec,
    JointnessReport,
    SampleBatch,
    SpectralProfile,
    class_means,
    empirical_moments,
    jointness_residual,
    make_priors,
    population_spectra,
    sample,
)
from .dynamics import (
    DeepInitSpec,
    TrajectoryRecord,
    bilinear_specgd,
    deep_specgd,
    gd_discrete,
    gd_epsilon_time,
    gf,
    ngf_integrate,
    saturation_gap,
    specgd_discrete,
    specgf,
)
from .errors import (
    ConditionsNotMet,
    ConfigError,
    DimensionError,
    NonConvergence,
    NonFiniteUpdate,
    SpeclabError,
    StepSizeTooLarge,
    ZeroMatrix,
)
from .estimator import SpectrumDescentClassifier
from .kernels import (
    SvdFactors,
    norm,
    polar_factor,
    random_orthonormal,
    sign_matrix,
    spectral_norm_upper,
    svd_truncated,
)
from .metrics import (
    AccuracyReport,
    GapReport,
    LossBreakdown,
    TheoremConditions,
    accuracy_metrics,
    check_conditions,
    gap_verify,
    population_class_loss,
    spectral_balance_kl,
)
from .optimizers import (
    RULES,
    EmpiricalCrossEntropy,
    EmpiricalSquared,
    OptimizerConfig,
    OptimizerState,
    PopulationSquaredDeep,
    PopulationSquaredLinear,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "ConditionsNotMet",
    "ConfigError",
    "DataModelSpec",
    "DeepInitSpec",
    "DimensionError",
    "EmpiricalCrossEntropy",
    "EmpiricalSquared",
    "GapReport",
    "JointnessReport",
    "LossBreakdown",
    "NonConvergence",
    "NonFiniteUpdate",
    "OptimizerConfig",
    "OptimizerState",
    "PopulationSquaredDeep",
    "PopulationSquaredLinear",
    "RULES",
    "SampleBatch",
    "SpeclabError",
    "SpectralProfile",
    "SpectrumDescentClassifier",
    "StepSizeTooLarge",
    "SvdFactors",
    "TheoremConditions",
    "TrajectoryRecord",
    "ZeroMatrix",
    "accuracy_metrics",
    "bilinear_specgd",
    "check_conditions",
    "class_means",
    "deep_specgd",
    "empirical_moments",
    "gap_verify",
    "gd_discrete",
    "gd_epsilon_time",
    "gf",
    "jointness_residual",
    "make_priors",
    "ngf_integrate",
    "norm",
    "polar_factor",
    "population_class_loss",
    "population_spectra",
    "random_orthonormal",
    "run",
    "sample",
    "saturation_gap",
    "sign_matrix",
    "specgd_discrete",
    "specgf",
    "spectral_balance_kl",
    "spectral_norm_upper",
    "step",
    "svd_truncated",
]
