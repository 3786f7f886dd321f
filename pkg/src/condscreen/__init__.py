"""Model-free conditional feature screening with an exposure variable."""
from ._backend import BACKEND
from .baselines import ccsis_utility_all, dcsis_utility_all, sirs_utility_all
from .evalmetrics import EvaluationMetrics, aggregate, min_model_size, rank_of
from .screening import (
    ConditionalMomentTable,
    DataSet,
    KernelSpec,
    Method,
    ScreeningResult,
    UtilityVector,
    build_moment_table,
    csirs_all,
    csirs_utility,
    default_bandwidth,
    kernel_weight,
    rank_and_select,
    submodel_size,
)
from .simgen import Replication, Scenario, ScenarioSpec, generate

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConditionalMomentTable", "DataSet", "EvaluationMetrics", "KernelSpec",
    "Method", "Replication", "Scenario", "ScenarioSpec", "ScreeningResult", "UtilityVector",
    "aggregate", "build_moment_table", "ccsis_utility_all", "csirs_all", "csirs_utility",
    "dcsis_utility_all", "default_bandwidth", "generate", "kernel_weight", "min_model_size",
    "rank_and_select", "rank_of", "sirs_utility_all", "submodel_size",
]
