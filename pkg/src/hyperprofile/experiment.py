"""Metric-mismatch study over randomly generated hyperprofiles.

Builds profiles from random (bandwidth, data size) draws mapped through a
fitted prediction model, queries each one at the origin under both the
Euclidean and rectilinear metrics, and aggregates per-k mismatch counts
with 95% confidence intervals. Also houses the balance-property checker:
whenever one nonnegative 2-D point is strictly closer in the Euclidean
sense but strictly farther in the rectilinear sense, its coordinate gap
|x - y| is provably the smaller one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .knn import Metric, knn_query
from .profiles import Hyperprofile, max_normalized
from .regression import PredictionModel
from .validation import require

DEFAULT_PROFILE_SIZES = (250, 500, 1000, 2000, 5000)
DEFAULT_K_VALUES = (1, 2, 3, 4, 5, 10)
DEFAULT_BANDWIDTH_RANGE_KBPS = (250.0, 15000.0)
DEFAULT_DATA_SIZE_RANGE_BYTES = (6.0e4, 2.5e8)
DEFAULT_TRIALS_PER_SIZE = 50

# z quantile for a two-sided 95% normal interval
_Z_95 = 1.96


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of the mismatch study.

    ``normalize="max"`` rescales every random profile per dimension to
    [0, 1] before querying, making energy and time commensurate (raw J and
    ns differ by nine orders of magnitude, which would reduce both metrics
    to a pure time ranking). ``counting="ordered"`` counts ranks at which
    the two ordered answers disagree; ``"set"`` counts set differences.
    """

    model: PredictionModel
    profile_sizes: tuple[int, ...] = DEFAULT_PROFILE_SIZES
    k_values: tuple[int, ...] = DEFAULT_K_VALUES
    bandwidth_range_kbps: tuple[float, float] = DEFAULT_BANDWIDTH_RANGE_KBPS
    data_size_range_bytes: tuple[float, float] = DEFAULT_DATA_SIZE_RANGE_BYTES
    trials_per_size: int = 50
    seed: int = 0
    normalize: str = "max"
    counting: str = "ordered"

    def __post_init__(self):
        require(len(self.profile_sizes) > 0, "profile_sizes must be nonempty")
        require(all(int(n) >= 1 for n in self.profile_sizes), "profile sizes must be at least 1")
        require(
            len(set(self.profile_sizes)) == len(self.profile_sizes),
            "profile sizes must be unique (each size seeds its own trial streams)",
        )
        require(len(self.k_values) > 0, "k_values must be nonempty")
        require(all(int(k) >= 1 for k in self.k_values), "k values must be at least 1")
        require(int(self.trials_per_size) >= 1, "trials_per_size must be at least 1")
        require(int(self.seed) >= 0, "seed must be a nonnegative integer")
        _check_range(self.bandwidth_range_kbps, "bandwidth_range_kbps")
        _check_range(self.data_size_range_bytes, "data_size_range_bytes")
        require(self.normalize in ("max", "none"), "normalize must be 'max' or 'none'")
        require(self.counting in ("ordered", "set"), "counting must be 'ordered' or 'set'")


def _check_range(bounds: tuple[float, float], name: str) -> None:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo < hi):
        raise ValidationError(f"invalid range for {name}: need 0 < lo < hi, got ({lo}, {hi})")


@dataclass(frozen=True)
class MismatchStats:
    """Pooled mismatch statistics for one query size k."""

    k: int
    mean: float
    ci_halfwidth: float
    n_samples: int

    def __post_init__(self):
        require(self.ci_halfwidth >= 0, "ci_halfwidth must be nonnegative")


def confidence_interval(samples: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    """Mean and normal-approximation halfwidth (z * s / sqrt(n), sample std)."""
    if level != 0.95:
        raise ValidationError("only the 95% confidence level is supported")
    values = np.asarray(list(samples), dtype=float)
    if values.size < 2:
        raise ValidationError(f"insufficient samples: need at least 2, got {values.size}")
    halfwidth = _Z_95 * float(values.std(ddof=1)) / float(np.sqrt(values.size))
    return float(values.mean()), halfwidth


def generate_random_hyperprofile(
    n: int,
    model: PredictionModel,
    bandwidth_range_kbps: tuple[float, float] = DEFAULT_BANDWIDTH_RANGE_KBPS,
    data_size_range_bytes: tuple[float, float] = DEFAULT_DATA_SIZE_RANGE_BYTES,
    rng: np.random.Generator | None = None,
) -> Hyperprofile:
    """Profile of n nodes at predicted costs of uniformly random (b, d) draws.

    Node ids are zero-padded indices, so lexicographic tie-breaking matches
    draw order. Deterministic for a given generator state.
    """
    require(int(n) >= 1, "profile size must be at least 1")
    _check_range(bandwidth_range_kbps, "bandwidth_range_kbps")
    _check_range(data_size_range_bytes, "data_size_range_bytes")
    if rng is None:
        rng = np.random.default_rng()
    bandwidth = rng.uniform(*bandwidth_range_kbps, size=n)
    data_size = rng.uniform(*data_size_range_bytes, size=n)
    width = len(str(int(n) - 1))
    return Hyperprofile(
        dimensions=("energy_j", "time_ns"),
        node_ids=tuple(f"n{i:0{width}d}" for i in range(int(n))),
        coords=np.column_stack(
            [model.predict_energy(bandwidth, data_size), model.predict_time(bandwidth, data_size)]
        ),
        kind="hyper",
    )


@dataclass(frozen=True)
class MismatchDetail:
    """Coordinates behind one set-level disagreement, for the balance check."""

    k: int
    euclidean_only: tuple[float, float]
    rectilinear_only: tuple[float, float]


def run_mismatch_experiment(
    config: ExperimentConfig, collect_details: bool = False
) -> list[MismatchStats] | tuple[list[MismatchStats], list[MismatchDetail]]:
    """Run all (size, trial) cells and pool mismatch counts per k.

    Each trial draws a fresh random profile and queries the origin under
    both metrics. Per-trial RNG streams are derived from (seed, size,
    trial index), so results depend on neither execution order nor which
    other sizes are configured; a single-size run replays exactly the
    trials the pooled run used for that size. Pooled sample count per k is
    len(profile_sizes) * trials_per_size.

    With ``collect_details`` the set-level disagreements are also returned
    as coordinate pairs (in the queried, possibly normalized, space) so the
    balance property can be verified pairwise.
    """
    counts: dict[int, list[int]] = {k: [] for k in config.k_values}
    details: list[MismatchDetail] = []
    origin = np.zeros(2)
    k_max = max(config.k_values)
    for size in config.profile_sizes:
        for trial in range(config.trials_per_size):
            rng = np.random.default_rng([config.seed, size, trial])
            profile = generate_random_hyperprofile(
                size,
                config.model,
                config.bandwidth_range_kbps,
                config.data_size_range_bytes,
                rng,
            )
            queried = max_normalized(profile) if config.normalize == "max" else profile
            euclid = knn_query(queried, origin, min(k_max, size), Metric.EUCLIDEAN)
            rect = knn_query(queried, origin, min(k_max, size), Metric.RECTILINEAR)
            euclid_ids = euclid.node_ids
            rect_ids = rect.node_ids
            for k in config.k_values:
                top = min(k, size)
                if config.counting == "ordered":
                    count = sum(1 for a, b in zip(euclid_ids[:top], rect_ids[:top]) if a != b)
                else:
                    count = len(set(euclid_ids[:top]) - set(rect_ids[:top]))
                counts[k].append(count)
                if collect_details:
                    details.extend(_set_disagreements(queried, euclid_ids[:top], rect_ids[:top], k))
    stats = []
    for k in config.k_values:
        mean, halfwidth = confidence_interval(counts[k])
        stats.append(MismatchStats(k=k, mean=mean, ci_halfwidth=halfwidth, n_samples=len(counts[k])))
    if collect_details:
        return stats, details
    return stats


def run_mismatch_experiment_by_size(config: ExperimentConfig) -> dict[int, list[MismatchStats]]:
    """Per-size breakdown of the pooled study.

    Runs each configured size as its own experiment; because trial streams
    are keyed by (seed, size, trial), every cell matches the corresponding
    cell of the pooled run exactly.
    """
    return {
        size: run_mismatch_experiment(replace(config, profile_sizes=(size,)))
        for size in config.profile_sizes
    }


def _set_disagreements(
    profile: Hyperprofile, euclid_ids: tuple[str, ...], rect_ids: tuple[str, ...], k: int
) -> list[MismatchDetail]:
    euclid_only = set(euclid_ids) - set(rect_ids)
    rect_only = set(rect_ids) - set(euclid_ids)
    if not euclid_only or not rect_only:
        return []
    index = {nid: i for i, nid in enumerate(profile.node_ids)}
    out = []
    for e_id in sorted(euclid_only):
        for r_id in sorted(rect_only):
            e = profile.coords[index[e_id]]
            r = profile.coords[index[r_id]]
            out.append(
                MismatchDetail(
                    k=k,
                    euclidean_only=(float(e[0]), float(e[1])),
                    rectilinear_only=(float(r[0]), float(r[1])),
                )
            )
    return out


def write_mismatch_csv(stats: Sequence[MismatchStats], path: str | Path) -> None:
    """Write pooled stats as ``k,mean_mismatch,ci_halfwidth,n_samples``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("k", "mean_mismatch", "ci_halfwidth", "n_samples"))
        for s in stats:
            writer.writerow([s.k, repr(s.mean), repr(s.ci_halfwidth), s.n_samples])


class BalanceVerdict(Enum):
    """Outcome of the balance-property check on an ordered point pair."""

    HOLDS = "holds"
    VIOLATED = "violated"
    PRECONDITIONS_NOT_MET = "preconditions-not-met"


def check_balance_property(
    p1: tuple[float, float], p2: tuple[float, float]
) -> BalanceVerdict:
    """Evaluate the balance property on a pair of 2-D points.

    Preconditions: all four coordinates nonnegative, p1 strictly closer to
    the origin in the Euclidean sense, and p2 strictly closer in the
    rectilinear sense. When they hold, |x1 - y1| < |x2 - y2| is a theorem;
    VIOLATED is representable only so tests can detect an implementation
    bug. Nonnegativity matters: (3, 0) versus (-3, 1) would otherwise be a
    counterexample.
    """
    x1, y1 = float(p1[0]), float(p1[1])
    x2, y2 = float(p2[0]), float(p2[1])
    if min(x1, y1, x2, y2) < 0:
        return BalanceVerdict.PRECONDITIONS_NOT_MET
    if not (x1 * x1 + y1 * y1 < x2 * x2 + y2 * y2):
        return BalanceVerdict.PRECONDITIONS_NOT_MET
    if not (x2 + y2 < x1 + y1):
        return BalanceVerdict.PRECONDITIONS_NOT_MET
    return BalanceVerdict.HOLDS if abs(x1 - y1) < abs(x2 - y2) else BalanceVerdict.VIOLATED


@dataclass(frozen=True)
class BalanceCheckSummary:
    pairs_sampled: int
    pairs_satisfying: int
    violations: int
    seed: int


def run_balance_property_check(pairs: int, seed: int = 0, chunk: int = 200_000) -> BalanceCheckSummary:
    """Sample random nonnegative point pairs and count property violations.

    Coordinates are uniform on [0, 1]; the property is jointly scale
    invariant, so this covers every pair shape up to a common scale factor.
    Vectorized in chunks to keep memory flat for large pair counts.
    """
    require(int(pairs) >= 1, "pairs must be at least 1")
    rng = np.random.default_rng(seed)
    remaining = int(pairs)
    satisfying = 0
    violations = 0
    while remaining > 0:
        m = min(remaining, chunk)
        remaining -= m
        x1, y1, x2, y2 = rng.uniform(0.0, 1.0, size=(4, m))
        mask = (x1 * x1 + y1 * y1 < x2 * x2 + y2 * y2) & (x2 + y2 < x1 + y1)
        satisfying += int(mask.sum())
        violations += int((np.abs(x1[mask] - y1[mask]) >= np.abs(x2[mask] - y2[mask])).sum())
    return BalanceCheckSummary(
        pairs_sampled=int(pairs), pairs_satisfying=satisfying, violations=violations, seed=int(seed)
    )
