"""Multistep regression for transfer-cost prediction.

Stage one fits, for every fixed bandwidth, a straight line of cost versus
payload size (energy through the origin, time with a free intercept).
Stage two models how those per-bandwidth coefficients vary with bandwidth:
the energy slope as a power law, the time slope as a reciprocal, and the
time intercept as an exponential. The composed result predicts energy (J)
and transfer time (ns) for any bandwidth and payload size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataFormatError, ValidationError
from .traces import TraceRecord
from .validation import as_xy_pairs, require

BANDWIDTH_GROUP_SIG_DIGITS = 6
MODEL_UNITS = {"time": "ns", "energy": "J", "bandwidth": "Kbps", "data": "bytes"}


@dataclass(frozen=True)
class LinearFit:
    """Ordinary least squares line y = slope * x + intercept."""

    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self):
        require(self.r_squared <= 1.0, "r_squared cannot exceed 1")

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept


@dataclass(frozen=True)
class PowerLawModel:
    """y = coefficient * x ** exponent, fitted in log-log space."""

    coefficient: float
    exponent: float
    r_squared: float

    def __post_init__(self):
        require(self.coefficient > 0, "power law coefficient must be positive")
        require(self.r_squared <= 1.0, "r_squared cannot exceed 1")

    def predict(self, x):
        return self.coefficient * np.power(np.asarray(x, dtype=float), self.exponent)


@dataclass(frozen=True)
class ExponentialModel:
    """y = amplitude * exp(rate * x), fitted in log space."""

    amplitude: float
    rate: float
    r_squared: float

    def __post_init__(self):
        require(self.amplitude > 0, "exponential amplitude must be positive")
        require(self.r_squared <= 1.0, "r_squared cannot exceed 1")

    def predict(self, x):
        return self.amplitude * np.exp(self.rate * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ReciprocalModel:
    """y = numerator / x, a power law with the exponent pinned to -1."""

    numerator: float
    r_squared: float

    def __post_init__(self):
        require(self.numerator > 0, "reciprocal numerator must be positive")
        require(self.r_squared <= 1.0, "r_squared cannot exceed 1")

    def predict(self, x):
        return self.numerator / np.asarray(x, dtype=float)


@dataclass(frozen=True)
class PredictionModel:
    """Fitted cost predictors plus their fit-quality scores.

    Immutable once constructed; safe to share across threads.
    """

    energy_slope: PowerLawModel
    time_slope: ReciprocalModel
    time_intercept: ExponentialModel
    cv_energy: float
    cv_time: float

    def __post_init__(self):
        require(self.cv_energy <= 1.0, "cv_energy cannot exceed 1")
        require(self.cv_time <= 1.0, "cv_time cannot exceed 1")

    def predict_energy(self, bandwidth_kbps, data_size_bytes):
        """Predicted energy (J). Zero payload predicts exactly zero.

        Broadcasts over array inputs; bandwidth must be positive and
        payload nonnegative.
        """
        b, d = _check_prediction_inputs(bandwidth_kbps, data_size_bytes)
        result = self.energy_slope.predict(b) * d
        return float(result) if np.isscalar(bandwidth_kbps) and np.isscalar(data_size_bytes) else result

    def predict_time(self, bandwidth_kbps, data_size_bytes):
        """Predicted transfer time (ns), strictly positive for any payload."""
        b, d = _check_prediction_inputs(bandwidth_kbps, data_size_bytes)
        result = self.time_slope.predict(b) * d + self.time_intercept.predict(b)
        return float(result) if np.isscalar(bandwidth_kbps) and np.isscalar(data_size_bytes) else result


def _check_prediction_inputs(bandwidth_kbps, data_size_bytes):
    b = np.asarray(bandwidth_kbps, dtype=float)
    d = np.asarray(data_size_bytes, dtype=float)
    if b.size and (not np.all(np.isfinite(b)) or np.any(b <= 0)):
        raise ValidationError("bandwidth_kbps must be positive and finite")
    if d.size and (not np.all(np.isfinite(d)) or np.any(d < 0)):
        raise ValidationError("data_size_bytes must be nonnegative and finite")
    return b, d


def _r_squared(y: np.ndarray, predicted: np.ndarray) -> float:
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # Constant data can leave ulp-level rounding noise in both sums; treat
    # anything at that scale as exactly constant rather than dividing noise
    # by noise.
    noise_floor = (np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))) ** 2 * y.size
    if ss_tot <= noise_floor:
        return 1.0 if ss_res <= noise_floor else float("-inf")
    return 1.0 - ss_res / ss_tot


def fit_linear(points: Iterable[tuple[float, float]], force_zero_intercept: bool = False) -> LinearFit:
    """Least squares line through (x, y) points.

    With ``force_zero_intercept`` the intercept is pinned at 0 and the slope
    is sum(x*y) / sum(x^2). R^2 is always reported about the mean of y, so a
    forced-origin fit of off-origin data can score below zero.
    """
    x, y = as_xy_pairs(points, "points")
    if x.size < 2:
        raise ValidationError(f"insufficient data: need at least 2 points, got {x.size}")
    if force_zero_intercept:
        sum_xx = float(np.dot(x, x))
        if sum_xx == 0.0:
            raise ValidationError("degenerate x values: need at least one nonzero x")
        slope = float(np.dot(x, y)) / sum_xx
        intercept = 0.0
    else:
        if np.unique(x).size < 2:
            raise ValidationError("degenerate x values: all x are equal")
        x_mean = float(x.mean())
        y_mean = float(y.mean())
        dx = x - x_mean
        sum_xx = float(np.dot(dx, dx))
        if sum_xx == 0.0:
            raise ValidationError("degenerate x values: x spread is below float precision")
        slope = float(np.dot(dx, y - y_mean)) / sum_xx
        intercept = y_mean - slope * x_mean
    return LinearFit(slope=slope, intercept=intercept, r_squared=_r_squared(y, slope * x + intercept))


def fit_power(points: Iterable[tuple[float, float]]) -> PowerLawModel:
    """Fit y = a * x**p by OLS on log(y) vs log(x); R^2 is in log space."""
    x, y = as_xy_pairs(points, "points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("non-positive input: power law fits need strictly positive coordinates")
    line = fit_linear(zip(np.log(x), np.log(y)))
    return PowerLawModel(
        coefficient=math.exp(line.intercept), exponent=line.slope, r_squared=line.r_squared
    )


def fit_exponential(points: Iterable[tuple[float, float]]) -> ExponentialModel:
    """Fit y = A * exp(B * x) by OLS on log(y) vs x; R^2 is in log space."""
    x, y = as_xy_pairs(points, "points")
    if np.any(y <= 0):
        raise ValidationError("non-positive input: exponential fits need strictly positive y values")
    line = fit_linear(zip(x, np.log(y)))
    return ExponentialModel(amplitude=math.exp(line.intercept), rate=line.slope, r_squared=line.r_squared)


def fit_reciprocal(points: Iterable[tuple[float, float]]) -> ReciprocalModel:
    """Fit y = K / x by OLS of y on 1/x through the origin; R^2 in linear space."""
    x, y = as_xy_pairs(points, "points")
    if x.size < 2:
        raise ValidationError(f"insufficient data: need at least 2 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("non-positive input: reciprocal fits need strictly positive coordinates")
    inv_x = 1.0 / x
    numerator = float(np.dot(inv_x, y)) / float(np.dot(inv_x, inv_x))
    return ReciprocalModel(numerator=numerator, r_squared=_r_squared(y, numerator * inv_x))


def _round_sig(value: float, sig_digits: int) -> float:
    if value == 0:
        return 0.0
    return round(value, sig_digits - 1 - math.floor(math.log10(abs(value))))


def group_by_bandwidth(traces: Iterable[TraceRecord]) -> dict[float, list[TraceRecord]]:
    """Group records by bandwidth rounded to 6 significant digits, ascending.

    The training data comes from a design grid, so exact grouping (after
    rounding away representation jitter) is appropriate; no clustering.
    """
    groups: dict[float, list[TraceRecord]] = {}
    for record in traces:
        key = _round_sig(record.bandwidth_kbps, BANDWIDTH_GROUP_SIG_DIGITS)
        groups.setdefault(key, []).append(record)
    return dict(sorted(groups.items()))


def _target_values(records: list[TraceRecord], target: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.data_size_bytes for r in records])
    if target == "energy":
        y = np.array([r.energy_j for r in records])
    else:
        y = np.array([r.time_ns for r in records])
    return x, y


def _fit_group(records: list[TraceRecord], target: str) -> LinearFit:
    x, y = _target_values(records, target)
    # Energy through the origin: a zero-byte transfer consumes no energy.
    return fit_linear(zip(x, y), force_zero_intercept=(target == "energy"))


def cross_validate(traces: Iterable[TraceRecord], folds: int, target: str, seed: int = 0) -> float:
    """Mean out-of-fold R^2 of the per-bandwidth linear fits.

    Points are shuffled (seeded) and partitioned into folds within each
    bandwidth group; the fold assignment depends only on the seed and the
    grouping, so the energy and time targets see identical folds. Each fold's
    score pools held-out predictions across every group.
    """
    if target not in ("energy", "time"):
        raise ValidationError(f"target must be 'energy' or 'time', got {target!r}")
    require(folds >= 2, "folds must be at least 2")
    groups = group_by_bandwidth(traces)
    require(len(groups) > 0, "insufficient data: no traces given")
    for bandwidth, records in groups.items():
        if len(records) < folds:
            raise ValidationError(
                f"insufficient data: bandwidth group {bandwidth:g} has {len(records)} points, "
                f"needs at least {folds}"
            )
    rng = np.random.default_rng(seed)
    assignments = {
        bandwidth: rng.permutation(len(records)) % folds for bandwidth, records in groups.items()
    }
    scores = []
    for fold in range(folds):
        actual: list[np.ndarray] = []
        predicted: list[np.ndarray] = []
        for bandwidth, records in groups.items():
            mask = assignments[bandwidth] == fold
            train = [r for r, held_out in zip(records, mask) if not held_out]
            test = [r for r, held_out in zip(records, mask) if held_out]
            if not test:
                continue
            fit = _fit_group(train, target)
            x, y = _target_values(test, target)
            actual.append(y)
            predicted.append(fit.predict(x))
        y_all = np.concatenate(actual)
        scores.append(_r_squared(y_all, np.concatenate(predicted)))
    return float(np.mean(scores))


def fit_multistep(traces: Iterable[TraceRecord], cv_folds: int = 10, cv_seed: int = 0) -> PredictionModel:
    """Run the full two-stage fit and cross-validation over a trace set.

    Requires at least two bandwidth groups, each covering at least two
    distinct payload sizes. Stage-two fit errors (for example nonpositive
    per-group time intercepts, which cannot enter a log-space exponential
    fit) propagate to the caller.
    """
    traces = list(traces)
    groups = group_by_bandwidth(traces)
    if len(groups) < 2:
        raise ValidationError(
            f"insufficient groups: multistep fit needs at least 2 bandwidth groups, got {len(groups)}"
        )
    for bandwidth, records in groups.items():
        if len({r.data_size_bytes for r in records}) < 2:
            raise ValidationError(
                f"insufficient data: bandwidth group {bandwidth:g} needs at least 2 distinct data sizes"
            )
    bandwidths = np.array(list(groups))
    energy_fits = [_fit_group(records, "energy") for records in groups.values()]
    time_fits = [_fit_group(records, "time") for records in groups.values()]

    energy_slope = fit_power(zip(bandwidths, [f.slope for f in energy_fits]))
    time_slope = fit_reciprocal(zip(bandwidths, [f.slope for f in time_fits]))
    time_intercept = fit_exponential(zip(bandwidths, [f.intercept for f in time_fits]))

    return PredictionModel(
        energy_slope=energy_slope,
        time_slope=time_slope,
        time_intercept=time_intercept,
        cv_energy=cross_validate(traces, cv_folds, "energy", seed=cv_seed),
        cv_time=cross_validate(traces, cv_folds, "time", seed=cv_seed),
    )


def save_model(model: PredictionModel, path: str | Path) -> None:
    """Persist a fitted model as JSON with full float precision."""
    document = {
        "energy_slope": {
            "a": model.energy_slope.coefficient,
            "p": model.energy_slope.exponent,
            "r2": model.energy_slope.r_squared,
        },
        "time_slope": {"K": model.time_slope.numerator, "r2": model.time_slope.r_squared},
        "time_intercept": {
            "A": model.time_intercept.amplitude,
            "B": model.time_intercept.rate,
            "r2": model.time_intercept.r_squared,
        },
        "cv_energy": model.cv_energy,
        "cv_time": model.cv_time,
        "units": dict(MODEL_UNITS),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")


def load_model(path: str | Path) -> PredictionModel:
    """Load a model written by :func:`save_model`, validating the schema."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            document = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"not valid JSON: {exc}", path=str(path)) from None
    try:
        units = document["units"]
        if units != MODEL_UNITS:
            raise DataFormatError(f"unexpected units {units!r}, expected {MODEL_UNITS!r}", path=str(path))
        return PredictionModel(
            energy_slope=PowerLawModel(
                coefficient=float(document["energy_slope"]["a"]),
                exponent=float(document["energy_slope"]["p"]),
                r_squared=float(document["energy_slope"]["r2"]),
            ),
            time_slope=ReciprocalModel(
                numerator=float(document["time_slope"]["K"]),
                r_squared=float(document["time_slope"]["r2"]),
            ),
            time_intercept=ExponentialModel(
                amplitude=float(document["time_intercept"]["A"]),
                rate=float(document["time_intercept"]["B"]),
                r_squared=float(document["time_intercept"]["r2"]),
            ),
            cv_energy=float(document["cv_energy"]),
            cv_time=float(document["cv_time"]),
        )
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"missing or malformed field: {exc}", path=str(path)) from None
