"""Transfer trace records: CSV ingestion and synthetic training data.

A trace records one simulated transfer between a device and an access
point: link bandwidth, payload size, measured energy and elapsed time.
The synthetic generator draws from the closed-form cost surfaces that the
regression stage is expected to recover, so a noiseless dataset is an
exact fixed point of the fitting pipeline.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataFormatError, ValidationError
from .validation import require, require_nonnegative, require_positive

# Ground-truth generator coefficients. Energy per byte decays as a power of
# bandwidth; per-byte transmission time is the reciprocal of bandwidth scaled
# to ns/byte, plus a bandwidth-dependent setup overhead.
ENERGY_SLOPE_COEF = 0.015
ENERGY_SLOPE_EXP = -1.13
TIME_SLOPE_NUMERATOR = 8.04e6
TIME_INTERCEPT_AMPLITUDE = 222_873.0
TIME_INTERCEPT_RATE = 0.0004

DEFAULT_BANDWIDTH_GRID_KBPS = (250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0, 15000.0)
DEFAULT_DATA_SIZE_RANGE_BYTES = (60e3, 250e6)
DEFAULT_DATA_SIZE_COUNT = 20

TRACE_COLUMNS = ("bandwidth_kbps", "data_size_bytes", "energy_j", "time_ns")
DISTANCE_COLUMN = "distance_m"


def default_data_size_grid() -> tuple[float, ...]:
    """20 payload sizes log-spaced over the default 60 kB to 250 MB range."""
    lo, hi = DEFAULT_DATA_SIZE_RANGE_BYTES
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), DEFAULT_DATA_SIZE_COUNT))


def true_energy_j(bandwidth_kbps, data_size_bytes):
    """Noise-free energy cost (J) of sending the payload. Accepts arrays."""
    return ENERGY_SLOPE_COEF * np.power(bandwidth_kbps, ENERGY_SLOPE_EXP) * data_size_bytes


def true_time_ns(bandwidth_kbps, data_size_bytes):
    """Noise-free transfer time (ns), including the setup overhead. Accepts arrays."""
    slope = TIME_SLOPE_NUMERATOR / np.asarray(bandwidth_kbps, dtype=float)
    intercept = TIME_INTERCEPT_AMPLITUDE * np.exp(TIME_INTERCEPT_RATE * np.asarray(bandwidth_kbps, dtype=float))
    return slope * data_size_bytes + intercept


@dataclass(frozen=True)
class TraceRecord:
    """One observed transfer and its measured costs."""

    bandwidth_kbps: float
    data_size_bytes: float
    energy_j: float
    time_ns: float
    distance_m: float | None = None

    def __post_init__(self):
        require_positive(self.bandwidth_kbps, "bandwidth_kbps")
        require_positive(self.data_size_bytes, "data_size_bytes")
        require_nonnegative(self.energy_j, "energy_j")
        require_nonnegative(self.time_ns, "time_ns")
        if self.distance_m is not None:
            require_nonnegative(self.distance_m, "distance_m")


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters for the synthetic trace generator.

    ``noise_rel_sigma`` is the relative standard deviation of multiplicative
    Gaussian noise applied to the payload-proportional part of each cost
    (never to the time overhead term, so zero-payload costs stay exact).
    """

    bandwidth_grid_kbps: tuple[float, ...] = DEFAULT_BANDWIDTH_GRID_KBPS
    data_size_grid_bytes: tuple[float, ...] = field(default_factory=default_data_size_grid)
    noise_rel_sigma: float = 0.0
    seed: int = 0
    include_distance: bool = False
    distance_range_m: tuple[float, float] = (10.0, 100.0)

    def __post_init__(self):
        require(len(self.bandwidth_grid_kbps) > 0, "bandwidth grid must be nonempty")
        require(len(self.data_size_grid_bytes) > 0, "data size grid must be nonempty")
        for b in self.bandwidth_grid_kbps:
            require_positive(b, "bandwidth grid entry")
        for d in self.data_size_grid_bytes:
            require_positive(d, "data size grid entry")
        require_nonnegative(self.noise_rel_sigma, "noise_rel_sigma")
        require(int(self.seed) >= 0, "seed must be a nonnegative integer")
        lo, hi = self.distance_range_m
        require_nonnegative(lo, "distance_range_m lower bound")
        require_nonnegative(hi, "distance_range_m upper bound")
        require(lo <= hi, "distance_range_m must be ordered (lo <= hi)")


def gen_traces(config: GeneratorConfig) -> list[TraceRecord]:
    """Generate one record per (bandwidth, data size) grid cell.

    Deterministic for a given config: the RNG is seeded from ``config.seed``
    and consumed in fixed grid order (bandwidth-major). Costs are floored at
    zero so extreme noise draws cannot produce negative measurements.
    """
    rng = np.random.default_rng(config.seed)
    sigma = config.noise_rel_sigma
    records: list[TraceRecord] = []
    for b in config.bandwidth_grid_kbps:
        energy_per_byte = ENERGY_SLOPE_COEF * b**ENERGY_SLOPE_EXP
        time_per_byte = TIME_SLOPE_NUMERATOR / b
        time_overhead = TIME_INTERCEPT_AMPLITUDE * np.exp(TIME_INTERCEPT_RATE * b)
        for d in config.data_size_grid_bytes:
            eps_energy, eps_time = rng.standard_normal(2)
            energy = energy_per_byte * d * (1.0 + sigma * eps_energy)
            time = time_per_byte * d * (1.0 + sigma * eps_time) + time_overhead
            distance = None
            if config.include_distance:
                lo, hi = config.distance_range_m
                distance = float(rng.uniform(lo, hi))
            records.append(
                TraceRecord(
                    bandwidth_kbps=float(b),
                    data_size_bytes=float(d),
                    energy_j=max(float(energy), 0.0),
                    time_ns=max(float(time), 0.0),
                    distance_m=distance,
                )
            )
    return records


def write_traces(records: list[TraceRecord], path: str | Path) -> None:
    """Write records as CSV with full round-trip float precision."""
    records = list(records)
    with_distance = any(r.distance_m is not None for r in records)
    if with_distance and not all(r.distance_m is not None for r in records):
        raise ValidationError("either all records or no records may carry distance_m")
    header = TRACE_COLUMNS + ((DISTANCE_COLUMN,) if with_distance else ())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in records:
            row = [repr(r.bandwidth_kbps), repr(r.data_size_bytes), repr(r.energy_j), repr(r.time_ns)]
            if with_distance:
                row.append(repr(r.distance_m))
            writer.writerow(row)


def _parse_field(raw: str, column: str, path: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DataFormatError(f"field {column!r} is not a number: {raw!r}", path=path, line=line) from None


def ingest_traces(path: str | Path) -> list[TraceRecord]:
    """Parse a trace CSV, preserving row order.

    Raises FileNotFoundError for a missing file and DataFormatError (with the
    1-based file line and offending field) for schema violations, malformed
    numbers, or non-positive bandwidth / data size.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file, expected a header row", path=str(path), line=1) from None
        header = tuple(h.strip() for h in header)
        if header == TRACE_COLUMNS:
            with_distance = False
        elif header == TRACE_COLUMNS + (DISTANCE_COLUMN,):
            with_distance = True
        else:
            raise DataFormatError(
                f"unexpected header {','.join(header)!r}, expected {','.join(TRACE_COLUMNS)}"
                f"[,{DISTANCE_COLUMN}]",
                path=str(path),
                line=1,
            )
        expected_width = len(header)
        records: list[TraceRecord] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != expected_width:
                raise DataFormatError(
                    f"expected {expected_width} fields, got {len(row)}", path=str(path), line=line_no
                )
            values = [_parse_field(raw, col, str(path), line_no) for raw, col in zip(row, header)]
            try:
                records.append(
                    TraceRecord(
                        bandwidth_kbps=values[0],
                        data_size_bytes=values[1],
                        energy_j=values[2],
                        time_ns=values[3],
                        distance_m=values[4] if with_distance else None,
                    )
                )
            except ValidationError as exc:
                raise DataFormatError(str(exc), path=str(path), line=line_no) from None
    return records
