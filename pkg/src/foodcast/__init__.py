"""Food-production forecasting with ANFIS and multilayer perceptrons."""

from .anfis import AnfisConfig, AnfisModel, AnfisRegressor, train_hybrid
from .dataset import Scaler, SeriesTable, SupervisedSet, aggregate, build_features, parse_csv, split_random
from .forecast import ForecastResult, recursive_forecast
from .membership import MembershipFunction, MFKind
from .metrics import r2_paper, r2_standard, rmse
from .mlp import MlpModel, MlpRegressor, MlpTrainConfig

__version__ = "0.1.0"

__all__ = [
    "AnfisConfig",
    "AnfisModel",
    "AnfisRegressor",
    "ForecastResult",
    "MFKind",
    "MembershipFunction",
    "MlpModel",
    "MlpRegressor",
    "MlpTrainConfig",
    "Scaler",
    "SeriesTable",
    "SupervisedSet",
    "aggregate",
    "build_features",
    "parse_csv",
    "r2_paper",
    "r2_standard",
    "recursive_forecast",
    "rmse",
    "split_random",
    "train_hybrid",
]
