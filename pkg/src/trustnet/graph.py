"""Signed directed graph model and Bitcoin-OTC-style edge-list ingestion.

Nodes keep their raw integer labels from the input file; internally every
graph uses a dense 0..N-1 index (ascending raw-id order) so that numpy
kernels can operate on flat arrays. All graphs are immutable: every
operation returns a new instance, so instances are safe to share across
workers.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

HEADER = "SOURCE,TARGET,RATING,TIME"


class IngestError(ValueError):
    """Raised for rejected rows; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class SignedEdge:
    """One rating arc. Weight is the rescaled rating in [-1, 1]."""

    src: int
    dst: int
    weight: float
    timestamp: int
    predicted: bool = False


class SignedDiGraph:
    """Directed, signed, weighted, timestamped graph with a node registry.

    Edge data is stored as parallel column arrays sorted by (src, dst)
    dense index, which fixes the traversal order used by every kernel.
    """

    def __init__(self, node_ids, src, dst, weight, timestamp, predicted=None):
        node_ids = np.asarray(node_ids, dtype=np.int64)
        if node_ids.size and np.any(np.diff(node_ids) <= 0):
            raise ValueError("node_ids must be strictly increasing")
        self.node_ids = node_ids
        self.num_nodes = int(node_ids.size)

        src = np.asarray(src, dtype=np.int32)
        dst = np.asarray(dst, dtype=np.int32)
        weight = np.asarray(weight, dtype=np.float64)
        timestamp = np.asarray(timestamp, dtype=np.int64)
        if predicted is None:
            predicted = np.zeros(src.size, dtype=bool)
        predicted = np.asarray(predicted, dtype=bool)
        if not (src.size == dst.size == weight.size == timestamp.size == predicted.size):
            raise ValueError("edge columns must have equal length")
        if src.size:
            if src.min() < 0 or src.max() >= self.num_nodes:
                raise ValueError("edge src index out of range")
            if dst.min() < 0 or dst.max() >= self.num_nodes:
                raise ValueError("edge dst index out of range")
            if np.abs(weight).max() > 1.0:
                raise ValueError("edge weights must lie in [-1, 1]")
        order = np.lexsort((dst, src))
        self.src = src[order]
        self.dst = dst[order]
        self.weight = weight[order]
        self.timestamp = timestamp[order]
        self.predicted = predicted[order]
        key = self.src.astype(np.int64) * max(self.num_nodes, 1) + self.dst
        if key.size and np.any(np.diff(key) == 0):
            raise ValueError("duplicate (src, dst) edge")
        for arr in (self.node_ids, self.src, self.dst, self.weight,
                    self.timestamp, self.predicted):
            arr.flags.writeable = False
        self._index_of = {int(n): i for i, n in enumerate(node_ids)}
        self._cache = {}

    # -- construction -------------------------------------------------

    @classmethod
    def from_raw_edges(cls, rows, predicted=None):
        """Build from (src_id, dst_id, weight, timestamp) tuples."""
        rows = list(rows)
        if rows:
            src_ids, dst_ids, w, t = (np.asarray(col) for col in zip(*rows))
        else:
            src_ids = dst_ids = np.empty(0, dtype=np.int64)
            w = np.empty(0)
            t = np.empty(0, dtype=np.int64)
        node_ids = np.unique(np.concatenate([src_ids, dst_ids])).astype(np.int64)
        lookup = {int(n): i for i, n in enumerate(node_ids)}
        src = np.fromiter((lookup[int(s)] for s in src_ids), dtype=np.int32, count=len(rows))
        dst = np.fromiter((lookup[int(d)] for d in dst_ids), dtype=np.int32, count=len(rows))
        return cls(node_ids, src, dst, w, t, predicted)

    # -- lookups -------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    def index_of(self, node_id: int) -> int:
        try:
            return self._index_of[int(node_id)]
        except KeyError:
            raise KeyError(f"node {node_id} is not in the graph") from None

    def has_node(self, node_id: int) -> bool:
        return int(node_id) in self._index_of

    def edges(self):
        """Iterate edges as SignedEdge records with raw node ids."""
        ids = self.node_ids
        for s, d, w, t, p in zip(self.src, self.dst, self.weight,
                                 self.timestamp, self.predicted):
            yield SignedEdge(int(ids[s]), int(ids[d]), float(w), int(t), bool(p))

    # -- adjacency views ----------------------------------------------

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def out_adjacency(self) -> sp.csr_matrix:
        """CSR over dense indices; rows = sources. Predicted edges included."""
        return self._cached("out", lambda: sp.csr_matrix(
            (self.weight, (self.src, self.dst)),
            shape=(self.num_nodes, self.num_nodes)))

    def in_adjacency(self) -> sp.csr_matrix:
        """CSR over dense indices; rows = targets."""
        return self._cached("in", lambda: sp.csr_matrix(
            (self.weight, (self.dst, self.src)),
            shape=(self.num_nodes, self.num_nodes)))

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.num_nodes)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.num_nodes)

    def observed_mask(self) -> np.ndarray:
        return ~self.predicted

    def summary(self) -> dict:
        w = self.weight[~self.predicted]
        n_obs = int(w.size)
        return {
            "nodes": self.num_nodes,
            "edges": n_obs,
            "predicted_edges": int(self.predicted.sum()),
            "positive_edge_fraction": float((w > 0).sum() / n_obs) if n_obs else 0.0,
            "min_weight": float(w.min()) if n_obs else 0.0,
            "max_weight": float(w.max()) if n_obs else 0.0,
        }


# -- ingestion ----------------------------------------------------------


def _open_text(path):
    path = str(path)
    if path.endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def ingest_csv(path, weight_divisor: float = 10.0) -> SignedDiGraph:
    """Ingest a `SOURCE,TARGET,RATING,TIME` edge list (optionally gzipped).

    Ratings are integers in [-10, 10], rescaled to weight = RATING / divisor.
    Rejected outright (with the offending line number): malformed rows,
    ratings outside the valid range, zero ratings and self-loops. Duplicate
    (src, dst) pairs collapse to the row with the greatest TIME; ties keep
    the later row in file order.
    """
    if weight_divisor <= 0:
        raise ValueError("weight_divisor must be positive")
    latest = {}
    with _open_text(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line_no == 1 and line.upper().replace(" ", "") == HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise IngestError(line_no, f"expected 4 comma-separated fields, got {len(parts)}")
            try:
                src = int(parts[0])
                dst = int(parts[1])
                rating = int(parts[2])
                # timestamps in the public file are float-formatted epochs
                tstamp = int(float(parts[3]))
            except ValueError:
                raise IngestError(line_no, f"malformed row {line!r}") from None
            if rating == 0:
                raise IngestError(line_no, "rating 0 is not a valid trust signal")
            if not -10 <= rating <= 10:
                raise IngestError(line_no, f"rating {rating} outside [-10, 10]")
            if abs(rating) > weight_divisor:
                raise IngestError(
                    line_no, f"rating {rating} exceeds weight divisor {weight_divisor}")
            if src == dst:
                raise IngestError(line_no, f"self-loop on node {src}")
            prev = latest.get((src, dst))
            if prev is None or tstamp >= prev[1]:
                latest[(src, dst)] = (rating / weight_divisor, tstamp)
    rows = [(s, d, w, t) for (s, d), (w, t) in latest.items()]
    return SignedDiGraph.from_raw_edges(rows)


def to_csv(g: SignedDiGraph, path, weight_divisor: float = 10.0) -> None:
    """Write the observed edges back out in the ingestion format.

    Ratings that came in as integers round-trip exactly; predicted edges
    are excluded (use linkpred's edge-list writer for those).
    """
    ids = g.node_ids
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.num_edges):
            if g.predicted[i]:
                continue
            rating = g.weight[i] * weight_divisor
            rating_txt = str(int(round(rating))) if abs(rating - round(rating)) < 1e-9 \
                else repr(float(rating))
            fh.write(f"{ids[g.src[i]]},{ids[g.dst[i]]},{rating_txt},{g.timestamp[i]}\n")


# -- subgraphs ----------------------------------------------------------


def _from_edge_subset(g: SignedDiGraph, keep: np.ndarray) -> SignedDiGraph:
    """New graph from an edge mask; node set = incident nodes only."""
    src, dst = g.src[keep], g.dst[keep]
    used = np.unique(np.concatenate([src, dst]))
    remap = np.full(g.num_nodes, -1, dtype=np.int32)
    remap[used] = np.arange(used.size, dtype=np.int32)
    return SignedDiGraph(g.node_ids[used], remap[src], remap[dst],
                         g.weight[keep], g.timestamp[keep], g.predicted[keep])


def subgraph_by_time(g: SignedDiGraph, t_cutoff: int) -> SignedDiGraph:
    """Edges with timestamp <= t_cutoff plus their incident nodes."""
    return _from_edge_subset(g, g.timestamp <= t_cutoff)


def remove_nodes(g: SignedDiGraph, victims) -> SignedDiGraph:
    """Drop the victim nodes and every edge touching them.

    Survivor nodes are kept even if they end up isolated (they remain part
    of the network; only their edges to victims disappear).
    """
    victims = {int(v) for v in victims}
    for v in victims:
        if not g.has_node(v):
            raise KeyError(f"node {v} is not in the graph")
    victim_mask = np.zeros(g.num_nodes, dtype=bool)
    for v in victims:
        victim_mask[g.index_of(v)] = True
    keep_nodes = ~victim_mask
    keep_edges = keep_nodes[g.src] & keep_nodes[g.dst]
    kept = np.flatnonzero(keep_nodes)
    remap = np.full(g.num_nodes, -1, dtype=np.int32)
    remap[kept] = np.arange(kept.size, dtype=np.int32)
    return SignedDiGraph(g.node_ids[kept], remap[g.src[keep_edges]],
                         remap[g.dst[keep_edges]], g.weight[keep_edges],
                         g.timestamp[keep_edges], g.predicted[keep_edges])


def symmetrize(g: SignedDiGraph) -> sp.csr_matrix:
    """Symmetric weight matrix over dense indices.

    Each unordered pair takes the mean of whichever directed weights exist;
    one-sided edges pass through unchanged. Exact cancellations (w and -w)
    are dropped from the sparsity pattern: opposing ratings carry no net
    trust signal.
    """

    def build():
        n = g.num_nodes
        rows = np.concatenate([g.src, g.dst])
        cols = np.concatenate([g.dst, g.src])
        vals = np.concatenate([g.weight, g.weight])
        sums = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        counts = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
        sums.sum_duplicates()
        counts.sum_duplicates()
        out = sums.copy()
        out.data = sums.data / counts.data
        out.eliminate_zeros()
        return out

    return g._cached("sym", build)


def positive_sign_adjacency(g: SignedDiGraph) -> sp.csr_matrix:
    """Boolean positive-neighbor matrix (symmetrized sign, self-loops set).

    Every node counts as its own positive neighbor, matching the
    delta-goodness convention used by correlation clustering.
    """

    def build():
        sym = symmetrize(g)
        pos = sym.copy()
        pos.data = (pos.data > 0).astype(np.int8)
        pos.eliminate_zeros()
        pos = (pos + sp.identity(g.num_nodes, dtype=np.int8, format="csr"))
        pos.data = np.minimum(pos.data, 1).astype(np.int8)
        pos.sort_indices()
        return pos.astype(np.int8)

    return g._cached("possign", build)


# -- sampling -----------------------------------------------------------


def sample_temporal_prefix(g: SignedDiGraph, fraction: float) -> SignedDiGraph:
    """First floor(fraction * E) edges in (time, src_id, dst_id) order."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    order = temporal_order(g)
    take = int(np.floor(fraction * g.num_edges))
    keep = np.zeros(g.num_edges, dtype=bool)
    keep[order[:take]] = True
    return _from_edge_subset(g, keep)


def sample_nodes(g: SignedDiGraph, fraction: float, seed: int) -> SignedDiGraph:
    """Induced subgraph on a uniformly sampled node subset."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    take = max(1, int(round(fraction * g.num_nodes)))
    chosen = rng.choice(g.num_nodes, size=take, replace=False)
    drop_mask = np.ones(g.num_nodes, dtype=bool)
    drop_mask[chosen] = False
    victims = g.node_ids[drop_mask]
    return remove_nodes(g, victims)


def temporal_order(g: SignedDiGraph) -> np.ndarray:
    """Edge permutation sorted by (time, src_id, dst_id); the split order."""
    return np.lexsort((g.node_ids[g.dst], g.node_ids[g.src], g.timestamp))
