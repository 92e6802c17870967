"""Scikit-learn style wrappers around the fitting and query primitives.

These let the cost model and the node selector participate in sklearn
pipelines and model-selection tooling (``get_params`` / ``set_params`` /
``clone`` all work). The functional API in :mod:`hyperprofile.regression`
and :mod:`hyperprofile.knn` remains the primary surface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .errors import ValidationError
from .knn import Metric, QueryResult, build_index, knn_query
from .profiles import Hyperprofile
from .regression import PredictionModel, fit_multistep
from .traces import TraceRecord
from .validation import as_float_array


class MultistepRegressor(BaseEstimator, RegressorMixin):
    """Predicts transfer energy (J) and time (ns) from bandwidth and payload.

    X has two columns, ``bandwidth_kbps`` and ``data_size_bytes``; y has two
    columns, ``energy_j`` and ``time_ns``. The fitted state is exposed as
    ``model_``, a :class:`PredictionModel`.
    """

    def __init__(self, cv_folds: int = 10, cv_seed: int = 0):
        self.cv_folds = cv_folds
        self.cv_seed = cv_seed

    def fit(self, X, y):
        X = as_float_array(X, "X", ndim=2)
        y = as_float_array(y, "y", ndim=2)
        if X.shape[1] != 2 or y.shape[1] != 2:
            raise ValidationError("X and y must both have exactly 2 columns")
        if X.shape[0] != y.shape[0]:
            raise ValidationError("X and y must have the same number of rows")
        traces = [
            TraceRecord(
                bandwidth_kbps=row[0], data_size_bytes=row[1], energy_j=target[0], time_ns=target[1]
            )
            for row, target in zip(X, y)
        ]
        self.model_ = fit_multistep(traces, cv_folds=self.cv_folds, cv_seed=self.cv_seed)
        return self

    def predict(self, X):
        model = self._fitted_model()
        X = as_float_array(X, "X", ndim=2)
        if X.shape[1] != 2:
            raise ValidationError("X must have exactly 2 columns")
        return np.column_stack(
            [model.predict_energy(X[:, 0], X[:, 1]), model.predict_time(X[:, 0], X[:, 1])]
        )

    def _fitted_model(self) -> PredictionModel:
        model = getattr(self, "model_", None)
        if model is None:
            raise NotFittedError("MultistepRegressor is not fitted yet; call fit first")
        return model


class NearestNodeSelector(BaseEstimator):
    """Selects offloading targets as the k profile points nearest the origin.

    ``algorithm="kdtree"`` routes queries through the spatial index,
    ``"brute"`` through the linear scan; the two are exactly equivalent.
    """

    def __init__(self, k: int = 1, metric: str = "euclidean", algorithm: str = "kdtree"):
        self.k = k
        self.metric = metric
        self.algorithm = algorithm

    def fit(self, profile: Hyperprofile, y=None):
        if not isinstance(profile, Hyperprofile):
            raise ValidationError("fit expects a Hyperprofile")
        if self.algorithm not in ("kdtree", "brute"):
            raise ValidationError("algorithm must be 'kdtree' or 'brute'")
        self.profile_ = profile
        self.index_ = build_index(profile) if self.algorithm == "kdtree" else None
        return self

    def query(self, q=None, k: int | None = None) -> QueryResult:
        """Query at ``q`` (default: the origin) for ``k`` nodes (default: self.k)."""
        profile = getattr(self, "profile_", None)
        if profile is None:
            raise NotFittedError("NearestNodeSelector is not fitted yet; call fit first")
        if q is None:
            q = np.zeros(len(profile.dimensions))
        k = self.k if k is None else k
        metric = Metric.coerce(self.metric)
        if self.index_ is not None:
            return self.index_.query(q, k, metric)
        return knn_query(profile, q, k, metric)

    def select(self, q=None, k: int | None = None) -> tuple[str, ...]:
        """Node ids only, nearest first."""
        return self.query(q, k).node_ids
