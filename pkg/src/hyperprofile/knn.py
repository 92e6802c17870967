"""Distance metrics and exact k-nearest-neighbor queries over profiles.

Two metrics are supported: Euclidean (favors balanced cost trade-offs) and
rectilinear, also known as L1 or Manhattan (equivalent to minimizing the
sum of the costs when querying from the origin). Queries return exactly
min(k, n) nodes; equal distances are broken by ascending node_id so results
are deterministic and comparable across metrics.

``knn_query`` is a vectorized linear scan and serves as the semantic
reference. ``build_index`` constructs a k-d tree that must agree with the
scan exactly, ties included; both paths compute point distances with the
same routine so the floats are identical.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError
from .profiles import Hyperprofile
from .validation import as_float_array

_LEAF_SIZE = 16


class Metric(str, Enum):
    EUCLIDEAN = "euclidean"
    RECTILINEAR = "rectilinear"

    @classmethod
    def coerce(cls, value: "Metric | str") -> "Metric":
        try:
            return cls(value)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValidationError(f"unknown metric {value!r}; valid metrics: {valid}") from None


def _distances_to(coords: np.ndarray, q: np.ndarray, metric: Metric) -> np.ndarray:
    """Distance from every row of ``coords`` to ``q``.

    Shared by the linear scan and the k-d tree leaves; row-wise reductions
    are independent, so both callers see bitwise-identical values.
    """
    diff = coords - q
    if metric is Metric.EUCLIDEAN:
        return np.sqrt((diff * diff).sum(axis=1))
    return np.abs(diff).sum(axis=1)


def distance(p, q, metric: Metric | str) -> float:
    """Distance between two points of equal dimensionality."""
    metric = Metric.coerce(metric)
    p = as_float_array(p, "p", ndim=1)
    q = as_float_array(q, "q", ndim=1)
    if p.shape != q.shape:
        raise ValidationError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    return float(_distances_to(p.reshape(1, -1), q, metric)[0])


@dataclass(frozen=True)
class QueryResult:
    """An ordered query answer: (node_id, distance) pairs, nearest first."""

    metric: Metric
    k: int
    hits: tuple[tuple[str, float], ...]

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(node_id for node_id, _ in self.hits)

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(d for _, d in self.hits)


def _check_query(profile: Hyperprofile, q, k: int, metric: Metric | str):
    metric = Metric.coerce(metric)
    if len(profile) == 0:
        raise ValidationError("empty profile: nothing to query")
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    q = as_float_array(q, "q", ndim=1)
    if q.shape[0] != len(profile.dimensions):
        raise ValidationError(
            f"dimension mismatch: query has {q.shape[0]} coordinates, "
            f"profile has {len(profile.dimensions)}"
        )
    return q, int(k), metric


def knn_query(profile: Hyperprofile, q, k: int, metric: Metric | str) -> QueryResult:
    """Exact kNN by linear scan.

    Returns the min(k, n) points with the smallest (distance, node_id) sort
    key. Every returned point has strictly fewer than k points strictly
    closer to the query, matching the formal kNN membership condition;
    boundary ties are resolved by ascending node_id.
    """
    q, k, metric = _check_query(profile, q, k, metric)
    dists = _distances_to(profile.coords, q, metric)
    order = np.lexsort((profile.id_ranks(), dists))[: min(k, len(profile))]
    hits = tuple((profile.node_ids[i], float(dists[i])) for i in order)
    return QueryResult(metric=metric, k=k, hits=hits)


class _Node:
    __slots__ = ("lo", "hi", "indices", "left", "right")

    def __init__(self, lo, hi, indices=None, left=None, right=None):
        self.lo = lo
        self.hi = hi
        self.indices = indices
        self.left = left
        self.right = right


class KdTreeIndex:
    """A k-d tree over a profile's points, supporting both metrics.

    Nodes store bounding boxes of their actual points, so pruning stays
    correct for duplicated coordinates and for either metric. Exact, not
    approximate: query results equal the linear scan's, ties included.
    """

    def __init__(self, profile: Hyperprofile, leaf_size: int = _LEAF_SIZE):
        if len(profile) == 0:
            raise ValidationError("empty profile: nothing to index")
        if leaf_size < 1:
            raise ValidationError("leaf_size must be at least 1")
        self.profile = profile
        self._leaf_size = int(leaf_size)
        self._rank_to_index = np.argsort(profile.id_ranks())
        self._root = self._build(np.arange(len(profile), dtype=np.intp))

    def _build(self, indices: np.ndarray) -> _Node:
        points = self.profile.coords[indices]
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        if indices.size <= self._leaf_size:
            return _Node(lo, hi, indices=indices)
        split_dim = int(np.argmax(hi - lo))
        order = indices[np.argsort(points[:, split_dim], kind="stable")]
        mid = indices.size // 2
        return _Node(lo, hi, left=self._build(order[:mid]), right=self._build(order[mid:]))

    def _box_distance(self, node: _Node, q: np.ndarray, metric: Metric) -> float:
        # Lower bound on the distance from q to any point inside the box.
        gap = np.maximum(0.0, np.maximum(node.lo - q, q - node.hi))
        if metric is Metric.EUCLIDEAN:
            return float(np.sqrt((gap * gap).sum()))
        return float(gap.sum())

    def query(self, q, k: int, metric: Metric | str) -> QueryResult:
        q, k, metric = _check_query(self.profile, q, k, metric)
        k_eff = min(k, len(self.profile))
        ranks = self.profile.id_ranks()
        # Max-heap of the current best candidates, keyed by (distance, rank):
        # heapq is a min-heap, so negate both components.
        heap: list[tuple[float, float]] = []

        def visit(node: _Node) -> None:
            if len(heap) == k_eff and self._box_distance(node, q, metric) > -heap[0][0]:
                return
            if node.indices is not None:
                dists = _distances_to(self.profile.coords[node.indices], q, metric)
                for dist, idx in zip(dists, node.indices):
                    candidate = (-float(dist), -int(ranks[idx]))
                    if len(heap) < k_eff:
                        heapq.heappush(heap, candidate)
                    elif candidate > heap[0]:
                        heapq.heapreplace(heap, candidate)
                return
            first, second = node.left, node.right
            if self._box_distance(second, q, metric) < self._box_distance(first, q, metric):
                first, second = second, first
            visit(first)
            visit(second)

        visit(self._root)
        best = sorted((-d, -r) for d, r in heap)
        hits = tuple(
            (self.profile.node_ids[self._rank_to_index[int(r)]], d) for d, r in best
        )
        return QueryResult(metric=metric, k=k, hits=hits)


def build_index(profile: Hyperprofile) -> KdTreeIndex:
    """Build the accelerating spatial index for a profile."""
    return KdTreeIndex(profile)


def knn_query_indexed(index: KdTreeIndex, q, k: int, metric: Metric | str) -> QueryResult:
    """Exact kNN through the index; equals :func:`knn_query` on all inputs."""
    return index.query(q, k, metric)


def mismatch_count(a: QueryResult, b: QueryResult) -> int:
    """Number of nodes selected by one query but not the other (set based)."""
    if a.k != b.k:
        raise ValidationError(f"k mismatch: {a.k} vs {b.k}")
    return len(set(a.node_ids) - set(b.node_ids))


def ordered_mismatch_count(a: QueryResult, b: QueryResult) -> int:
    """Number of ranks at which the two ordered answers name different nodes."""
    if a.k != b.k:
        raise ValidationError(f"k mismatch: {a.k} vs {b.k}")
    return sum(1 for x, y in zip(a.node_ids, b.node_ids) if x != y)
