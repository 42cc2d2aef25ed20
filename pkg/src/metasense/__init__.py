"""Accuracy and metacognitive sensitivity in AI-assisted decisions.

Signal-detection model of an AI assistant whose confidence is logit-normal,
the ideal-observer reliance policy, closed-form and numerical team
accuracy, trial-level simulation and empirical meta-AUC estimation.
"""

from .confidence import (
    AiSpec,
    LogitNormal,
    Sensitivity,
    auc_from_d,
    calibration_curve,
    canonical_spec,
    confidence_density,
    d_from_auc,
    sample_ai_trial,
    sample_ai_trials,
    sensitivity_from_params,
)
from .empirical import (
    EstimateReport,
    LogFormatError,
    PredictionLog,
    UndefinedEstimateError,
    estimate_d,
    estimate_meta_auc,
    load_log,
    report,
)
from .numerics import (
    QuadratureError,
    bivariate_normal_cdf,
    integrate_1d,
    logit,
    logit_normal_expectation,
    rng_stream,
    sigmoid,
    std_normal_cdf,
    std_normal_quantile,
)
from .policy import Action, SwitchPoint, decide, switch_point, utility
from .scenario import (
    ComplementarityReport,
    GridCell,
    InversionPair,
    complementarity,
    find_inversions,
    sweep_grid,
)
from .simulator import (
    STUDY_CONDITIONS,
    HumanPolicy,
    SimSummary,
    TrialLog,
    TrialRecord,
    replicate_experiment_conditions,
    run_trials,
)
from .team import (
    CombinedAccuracy,
    HumanSpec,
    combined_accuracy,
    combined_constant,
    combined_constant_integral,
    combined_variable_approx,
    combined_variable_exact,
    conditional_correctness,
)

__version__ = "0.1.0"
