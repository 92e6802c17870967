import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hyperprofile import MultistepRegressor, NearestNodeSelector, ValidationError
from hyperprofile.knn import knn_query


def traces_as_arrays(traces):
    X = np.array([[t.bandwidth_kbps, t.data_size_bytes] for t in traces])
    y = np.array([[t.energy_j, t.time_ns] for t in traces])
    return X, y


class TestMultistepRegressor:
    def test_fit_predict_round_trip(self, noiseless_traces):
        X, y = traces_as_arrays(noiseless_traces)
        regressor = MultistepRegressor().fit(X, y)
        predictions = regressor.predict(X)
        assert predictions.shape == y.shape
        np.testing.assert_allclose(predictions, y, rtol=1e-9)

    def test_exposes_fitted_model(self, noiseless_traces):
        X, y = traces_as_arrays(noiseless_traces)
        regressor = MultistepRegressor().fit(X, y)
        assert regressor.model_.energy_slope.coefficient == pytest.approx(0.015, rel=1e-6)

    def test_score_is_one_on_noiseless_data(self, noiseless_traces):
        X, y = traces_as_arrays(noiseless_traces)
        regressor = MultistepRegressor().fit(X, y)
        assert regressor.score(X, y) == pytest.approx(1.0, abs=1e-9)

    def test_sklearn_params_protocol(self):
        regressor = MultistepRegressor(cv_folds=5, cv_seed=3)
        assert regressor.get_params() == {"cv_folds": 5, "cv_seed": 3}
        cloned = clone(regressor)
        assert cloned.get_params() == regressor.get_params()
        regressor.set_params(cv_folds=4)
        assert regressor.cv_folds == 4

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            MultistepRegressor().predict(np.ones((2, 2)))

    def test_shape_validation(self, noiseless_traces):
        X, y = traces_as_arrays(noiseless_traces)
        with pytest.raises(ValidationError):
            MultistepRegressor().fit(X[:, :1], y)
        with pytest.raises(ValidationError):
            MultistepRegressor().fit(X, y[:-1])


class TestNearestNodeSelector:
    def test_kdtree_and_brute_agree(self, reference_model, two_point_profile):
        for algorithm in ("kdtree", "brute"):
            selector = NearestNodeSelector(k=1, metric="euclidean", algorithm=algorithm)
            selector.fit(two_point_profile)
            assert selector.select() == ("p2",)

    def test_defaults_query_the_origin(self, two_point_profile):
        selector = NearestNodeSelector(k=2, metric="rectilinear").fit(two_point_profile)
        result = selector.query()
        expected = knn_query(two_point_profile, np.zeros(2), 2, "rectilinear")
        assert result == expected

    def test_query_overrides(self, two_point_profile):
        selector = NearestNodeSelector(k=1, metric="euclidean").fit(two_point_profile)
        result = selector.query(q=(0.233, 0.361), k=1)
        assert result.node_ids == ("p2",)
        assert result.hits[0][1] == 0.0

    def test_unfitted_query_raises(self):
        with pytest.raises(NotFittedError):
            NearestNodeSelector().query()

    def test_requires_hyperprofile(self):
        with pytest.raises(ValidationError):
            NearestNodeSelector().fit(np.ones((3, 2)))

    def test_bad_algorithm_rejected(self, two_point_profile):
        with pytest.raises(ValidationError):
            NearestNodeSelector(algorithm="ann").fit(two_point_profile)

    def test_sklearn_params_protocol(self):
        selector = NearestNodeSelector(k=3, metric="rectilinear", algorithm="brute")
        params = selector.get_params()
        assert params == {"k": 3, "metric": "rectilinear", "algorithm": "brute"}
        assert clone(selector).get_params() == params
