"""Predicted-cost server profiles with exact kNN node selection.

The pipeline: generate or ingest transfer traces, fit the multistep cost
model (energy and time as functions of bandwidth and payload size), place
candidate servers in a cost feature space where the user sits at the
origin, and pick offloading targets with exact k-nearest-neighbor queries
under the Euclidean or rectilinear metric. A Monte Carlo harness measures
how often the two metrics disagree, and a bulk checker verifies the
balance property that explains the direction of every disagreement.
"""

from .errors import DataFormatError, HyperprofileError, ValidationError
from .estimators import MultistepRegressor, NearestNodeSelector
from .experiment import (
    BalanceCheckSummary,
    BalanceVerdict,
    ExperimentConfig,
    MismatchDetail,
    MismatchStats,
    check_balance_property,
    confidence_interval,
    generate_random_hyperprofile,
    run_balance_property_check,
    run_mismatch_experiment,
    run_mismatch_experiment_by_size,
    write_mismatch_csv,
)
from .knn import (
    KdTreeIndex,
    Metric,
    QueryResult,
    build_index,
    distance,
    knn_query,
    knn_query_indexed,
    mismatch_count,
    ordered_mismatch_count,
)
from .profiles import (
    Hyperprofile,
    NodeSpec,
    ProfilePoint,
    TaskSpec,
    build_base_profile,
    build_hyperprofile,
    max_normalized,
    read_fleet_csv,
    read_profile_csv,
    write_profile_csv,
)
from .regression import (
    ExponentialModel,
    LinearFit,
    PowerLawModel,
    PredictionModel,
    ReciprocalModel,
    cross_validate,
    fit_exponential,
    fit_linear,
    fit_multistep,
    fit_power,
    fit_reciprocal,
    group_by_bandwidth,
    load_model,
    save_model,
)
from .traces import GeneratorConfig, TraceRecord, gen_traces, ingest_traces, write_traces

__version__ = "0.1.0"

__all__ = [
    "BalanceCheckSummary",
    "BalanceVerdict",
    "DataFormatError",
    "ExperimentConfig",
    "ExponentialModel",
    "GeneratorConfig",
    "Hyperprofile",
    "HyperprofileError",
    "KdTreeIndex",
    "LinearFit",
    "Metric",
    "MismatchDetail",
    "MismatchStats",
    "MultistepRegressor",
    "NearestNodeSelector",
    "NodeSpec",
    "PowerLawModel",
    "PredictionModel",
    "ProfilePoint",
    "QueryResult",
    "ReciprocalModel",
    "TaskSpec",
    "TraceRecord",
    "ValidationError",
    "build_base_profile",
    "build_hyperprofile",
    "build_index",
    "check_balance_property",
    "confidence_interval",
    "cross_validate",
    "distance",
    "fit_exponential",
    "fit_linear",
    "fit_multistep",
    "fit_power",
    "fit_reciprocal",
    "gen_traces",
    "generate_random_hyperprofile",
    "group_by_bandwidth",
    "ingest_traces",
    "knn_query",
    "knn_query_indexed",
    "load_model",
    "max_normalized",
    "mismatch_count",
    "ordered_mismatch_count",
    "read_fleet_csv",
    "read_profile_csv",
    "run_balance_property_check",
    "run_mismatch_experiment",
    "run_mismatch_experiment_by_size",
    "save_model",
    "write_mismatch_csv",
    "write_profile_csv",
    "write_traces",
]
