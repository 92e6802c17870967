"""Server profiles: labeled point sets in a cost feature space.

Each point is one candidate server. In a base profile the coordinates are
deterministic metrics read straight from the node specs; in a hyperprofile
they are per-task predicted costs (energy in J, time in ns). Every
dimension is something to minimize, so the querying user sits at the
origin and near means cheap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataFormatError, ValidationError
from .regression import PredictionModel
from .validation import as_float_array, require, require_positive

HYPERPROFILE_DIMENSIONS = ("energy_j", "time_ns")


@dataclass(frozen=True)
class NodeSpec:
    """A candidate offloading target and its link bandwidth to the user."""

    node_id: str
    bandwidth_kbps: float
    static_metrics: Mapping[str, float] | None = None

    def __post_init__(self):
        require(bool(str(self.node_id)), "node_id must be nonempty")
        require_positive(self.bandwidth_kbps, "bandwidth_kbps")


@dataclass(frozen=True)
class TaskSpec:
    """A task to offload: payload size and the number of partitions wanted."""

    data_size_bytes: float
    partitions: int = 1

    def __post_init__(self):
        require_positive(self.data_size_bytes, "data_size_bytes")
        require(int(self.partitions) >= 1, "partitions must be at least 1")


@dataclass(frozen=True)
class ProfilePoint:
    node_id: str
    coords: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class Hyperprofile:
    """An immutable labeled point set with one row per node.

    All coordinates are nonnegative (the balance property of origin queries
    relies on this) and every node_id is unique. ``kind`` records whether the
    dimensions are deterministic metrics ("base") or predictions ("hyper").
    """

    dimensions: tuple[str, ...]
    node_ids: tuple[str, ...]
    coords: np.ndarray
    kind: str = "hyper"
    _id_ranks: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        require(len(self.dimensions) >= 1, "a profile needs at least one dimension")
        require(self.kind in ("base", "hyper"), f"kind must be 'base' or 'hyper', got {self.kind!r}")
        object.__setattr__(self, "dimensions", tuple(str(d) for d in self.dimensions))
        object.__setattr__(self, "node_ids", tuple(str(n) for n in self.node_ids))
        coords = as_float_array(self.coords, "coords")
        if coords.ndim != 2 or coords.shape[1] != len(self.dimensions):
            raise ValidationError(
                f"coords must have shape (n, {len(self.dimensions)}), got {coords.shape}"
            )
        require(coords.shape[0] == len(self.node_ids), "one coordinate row per node_id required")
        if coords.size and np.any(coords < 0):
            raise ValidationError("profile coordinates must be nonnegative")
        coords = np.ascontiguousarray(coords)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if len(set(self.node_ids)) != len(self.node_ids):
            raise ValidationError("node_ids must be unique within a profile")

    def __len__(self) -> int:
        return len(self.node_ids)

    @property
    def points(self) -> list[ProfilePoint]:
        return [
            ProfilePoint(node_id=nid, coords=tuple(row))
            for nid, row in zip(self.node_ids, self.coords)
        ]

    def id_ranks(self) -> np.ndarray:
        """Rank of each node_id under ascending lexicographic order.

        Used as the deterministic tie-breaker for equal query distances;
        computed lazily and cached (the profile is otherwise immutable).
        """
        if self._id_ranks is None:
            order = sorted(range(len(self.node_ids)), key=lambda i: self.node_ids[i])
            ranks = np.empty(len(order), dtype=np.intp)
            ranks[np.asarray(order, dtype=np.intp)] = np.arange(len(order), dtype=np.intp)
            object.__setattr__(self, "_id_ranks", ranks)
        return self._id_ranks


def build_hyperprofile(
    nodes: Sequence[NodeSpec], task: TaskSpec, model: PredictionModel
) -> Hyperprofile:
    """Position every node by its predicted (energy_j, time_ns) for the task."""
    nodes = list(nodes)
    if not nodes:
        raise ValidationError("empty fleet: at least one node is required")
    bandwidths = np.array([n.bandwidth_kbps for n in nodes])
    energy = model.predict_energy(bandwidths, task.data_size_bytes)
    time = model.predict_time(bandwidths, task.data_size_bytes)
    return Hyperprofile(
        dimensions=HYPERPROFILE_DIMENSIONS,
        node_ids=tuple(n.node_id for n in nodes),
        coords=np.column_stack([energy, time]),
        kind="hyper",
    )


def build_base_profile(nodes: Sequence[NodeSpec], metric_names: Sequence[str]) -> Hyperprofile:
    """Position every node by deterministic metrics from its static_metrics map."""
    nodes = list(nodes)
    if not nodes:
        raise ValidationError("empty fleet: at least one node is required")
    metric_names = tuple(metric_names)
    if not metric_names:
        raise ValidationError("a profile needs at least one dimension")
    rows = []
    for node in nodes:
        metrics = node.static_metrics or {}
        row = []
        for name in metric_names:
            if name not in metrics:
                raise ValidationError(f"missing metric: node {node.node_id!r} has no {name!r}")
            row.append(float(metrics[name]))
        rows.append(row)
    return Hyperprofile(
        dimensions=metric_names,
        node_ids=tuple(n.node_id for n in nodes),
        coords=np.array(rows, dtype=float),
        kind="base",
    )


def max_normalized(profile: Hyperprofile) -> Hyperprofile:
    """Rescale each dimension by its maximum so coordinates land in [0, 1].

    Makes dimensions with wildly different natural units (J versus ns)
    commensurate before a mixed-metric query; a constant-zero dimension is
    left unchanged. The result is unit-free.
    """
    coords = np.array(profile.coords, copy=True)
    if len(profile):
        scale = coords.max(axis=0)
        scale[scale == 0.0] = 1.0
        coords /= scale
    return Hyperprofile(
        dimensions=profile.dimensions, node_ids=profile.node_ids, coords=coords, kind=profile.kind
    )


def write_profile_csv(profile: Hyperprofile, path: str | Path) -> None:
    """Export as ``node_id,<dim1>,<dim2>,...`` with full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("node_id",) + profile.dimensions)
        for nid, row in zip(profile.node_ids, profile.coords):
            writer.writerow([nid] + [repr(float(v)) for v in row])


def read_profile_csv(path: str | Path, kind: str = "hyper") -> Hyperprofile:
    """Read a profile written by :func:`write_profile_csv`."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file, expected a header row", path=str(path), line=1) from None
        if len(header) < 2 or header[0] != "node_id":
            raise DataFormatError(
                "expected header 'node_id,<dim1>[,<dim2>...]'", path=str(path), line=1
            )
        dimensions = tuple(header[1:])
        node_ids: list[str] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} fields, got {len(row)}", path=str(path), line=line_no
                )
            node_ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise DataFormatError("non-numeric coordinate", path=str(path), line=line_no) from None
    try:
        return Hyperprofile(
            dimensions=dimensions,
            node_ids=tuple(node_ids),
            coords=np.array(rows, dtype=float).reshape(len(rows), len(dimensions)),
            kind=kind,
        )
    except ValidationError as exc:
        raise DataFormatError(str(exc), path=str(path)) from None


def read_fleet_csv(path: str | Path) -> list[NodeSpec]:
    """Parse a fleet file: ``node_id,bandwidth_kbps[,metric=value;...]``.

    A leading header row (first field exactly ``node_id``) is skipped. The
    optional third column carries semicolon-separated static metrics.
    """
    path = Path(path)
    nodes: list[NodeSpec] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if line_no == 1 and row[0].strip() == "node_id":
                continue
            if len(row) not in (2, 3):
                raise DataFormatError(
                    f"expected 2 or 3 fields, got {len(row)}", path=str(path), line=line_no
                )
            node_id = row[0].strip()
            try:
                bandwidth = float(row[1])
            except ValueError:
                raise DataFormatError(
                    f"field 'bandwidth_kbps' is not a number: {row[1]!r}", path=str(path), line=line_no
                ) from None
            metrics: dict[str, float] | None = None
            if len(row) == 3 and row[2].strip():
                metrics = {}
                for item in row[2].split(";"):
                    if not item.strip():
                        continue
                    name, sep, value = item.partition("=")
                    if not sep:
                        raise DataFormatError(
                            f"static metric {item!r} is not of the form name=value",
                            path=str(path),
                            line=line_no,
                        )
                    try:
                        metrics[name.strip()] = float(value)
                    except ValueError:
                        raise DataFormatError(
                            f"static metric {name.strip()!r} has non-numeric value {value!r}",
                            path=str(path),
                            line=line_no,
                        ) from None
            try:
                nodes.append(NodeSpec(node_id=node_id, bandwidth_kbps=bandwidth, static_metrics=metrics))
            except ValidationError as exc:
                raise DataFormatError(str(exc), path=str(path), line=line_no) from None
    if not nodes:
        raise DataFormatError("fleet file contains no nodes", path=str(path))
    seen: set[str] = set()
    for node in nodes:
        if node.node_id in seen:
            raise DataFormatError(f"duplicate node_id {node.node_id!r}", path=str(path))
        seen.add(node.node_id)
    return nodes
