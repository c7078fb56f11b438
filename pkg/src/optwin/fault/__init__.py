"""Virtual fault-management model: forecasting, prognosis, diagnosis."""

from optwin.fault.gbt import (
    BoostedEnsemble,
    DiagnosisReport,
    FeatureImportance,
    GbtParams,
    TreeNode,
    diagnose,
    importance,
    train_gbt,
)
from optwin.fault.forecaster import (
    ForecastConfig,
    ForecasterModel,
    forecast,
    persistence_mse,
    train_forecaster,
)
from optwin.fault.prognosis import (
    PrognosisEvaluation,
    PrognosisReport,
    evaluate_prognosis,
    prognose,
)

__all__ = [
    "TreeNode",
    "BoostedEnsemble",
    "GbtParams",
    "FeatureImportance",
    "DiagnosisReport",
    "train_gbt",
    "importance",
    "diagnose",
    "ForecastConfig",
    "ForecasterModel",
    "train_forecaster",
    "forecast",
    "persistence_mse",
    "PrognosisReport",
    "PrognosisEvaluation",
    "prognose",
    "evaluate_prognosis",
]
