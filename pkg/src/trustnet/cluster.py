"""Signed community detection: spectral and delta-clean correlation.

Spectral: embed nodes with the bottom eigenvectors of the signed Laplacian
(absolute-degree diagonal minus symmetrized adjacency), then k-means.
Correlation: cautious pivot growth of delta-clean clusters, which needs no
target cluster count; the cleanliness parameter delta controls how much
positive-neighborhood leakage a cluster tolerates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from ._eigen import smallest_eigenpairs
from ._seeds import derive_seed
from .graph import SignedDiGraph, positive_sign_adjacency, symmetrize


class Partition:
    """Assignment of every node to exactly one of k contiguous clusters."""

    def __init__(self, node_ids, labels, num_clusters: int):
        self.node_ids = np.asarray(node_ids, dtype=np.int64)
        self.labels = np.asarray(labels, dtype=np.int64)
        self.num_clusters = int(num_clusters)
        if self.labels.size != self.node_ids.size:
            raise ValueError("labels and node_ids must align")
        if self.num_clusters < 1 and self.labels.size:
            raise ValueError("num_clusters must be >= 1")
        if self.labels.size:
            if self.labels.min() < 0 or self.labels.max() >= self.num_clusters:
                raise ValueError("cluster index out of range")
            sizes = np.bincount(self.labels, minlength=self.num_clusters)
            if (sizes == 0).any():
                empty = int(np.flatnonzero(sizes == 0)[0])
                raise ValueError(f"cluster {empty} is empty")
        self.labels.flags.writeable = False
        self._index = {int(n): i for i, n in enumerate(self.node_ids)}

    @classmethod
    def from_map(cls, assignment: dict) -> "Partition":
        nodes = np.array(sorted(assignment), dtype=np.int64)
        labels = np.array([assignment[int(n)] for n in nodes], dtype=np.int64)
        k = int(labels.max()) + 1 if labels.size else 0
        return cls(nodes, labels, k)

    def cluster_of(self, node_id) -> int:
        try:
            return int(self.labels[self._index[int(node_id)]])
        except KeyError:
            raise KeyError(f"node {node_id} is not in the partition") from None

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_clusters)

    def members(self, i: int) -> np.ndarray:
        if not 0 <= i < self.num_clusters:
            raise KeyError(f"no cluster {i}")
        return self.node_ids[self.labels == i]

    def as_map(self) -> dict:
        return {int(n): int(c) for n, c in zip(self.node_ids, self.labels)}


@dataclass(frozen=True)
class SpectralConfig:
    k: int
    embedding_dim: int | None = None
    kmeans_seed: int = 0
    kmeans_restarts: int = 10
    eig_tolerance: float = 1e-8

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.embedding_dim is not None and self.embedding_dim < 1:
            raise ValueError("embedding_dim must be >= 1")
        if self.kmeans_restarts < 1:
            raise ValueError("kmeans_restarts must be >= 1")
        if self.eig_tolerance <= 0:
            raise ValueError("eig_tolerance must be positive")

    @property
    def dim(self) -> int:
        return self.embedding_dim if self.embedding_dim is not None else self.k


@dataclass(frozen=True)
class CorrelationConfig:
    delta: float = 0.05
    pivot_order: str = "max_positive_degree"

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.delta >= 1 / 14:
            warnings.warn(
                f"delta={self.delta} leaves no headroom for the 3x/7x "
                "cleanliness thresholds (recommended delta < 1/14)",
                stacklevel=2)
        if self.pivot_order not in ("max_positive_degree", "node_id"):
            raise ValueError(f"unknown pivot order {self.pivot_order!r}")


# -- spectral ------------------------------------------------------------


def signed_laplacian(g: SignedDiGraph) -> sp.csr_matrix:
    """Absolute-degree diagonal minus symmetrized adjacency; always PSD."""
    A = symmetrize(g)
    degs = np.asarray(abs(A).sum(axis=1)).ravel()
    return (sp.diags(degs) - A).tocsr()


def spectral_embed(L, d: int, tol: float = 1e-8, seed: int = 0) -> np.ndarray:
    """Coordinates from the d bottom eigenvectors of L, one row per node."""
    _, vecs = smallest_eigenpairs(L, d, tol=tol, seed=seed)
    norms = np.linalg.norm(vecs, axis=0)
    return vecs / np.where(norms > 0, norms, 1.0)


def _kmeans_pp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = X[idx]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _kmeans_once(X, k, rng, max_iter=300, rel_tol=1e-6):
    """One seeded k-means run; None if a cluster comes out empty."""
    centers = _kmeans_pp(X, k, rng)
    prev_wcss = np.inf
    labels = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        wcss = float(d2[np.arange(X.shape[0]), labels].sum())
        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            return None
        for j in range(k):
            centers[j] = X[labels == j].mean(axis=0)
        if prev_wcss - wcss <= rel_tol * max(prev_wcss, 1e-300):
            break
        prev_wcss = wcss
    return labels, wcss


def spectral_cluster(g: SignedDiGraph, cfg: SpectralConfig) -> Partition:
    """Embed with the signed Laplacian, then best-of-restarts k-means.

    Restarts that produce an empty cluster are discarded and replaced by
    the next derived seed, so the result always has exactly k non-empty
    clusters. Fully deterministic given the config.
    """
    if g.num_nodes < cfg.k:
        raise ValueError(
            f"cannot form {cfg.k} clusters from {g.num_nodes} nodes")
    L = signed_laplacian(g)
    X = spectral_embed(L, min(cfg.dim, g.num_nodes), tol=cfg.eig_tolerance,
                       seed=derive_seed(cfg.kmeans_seed, "eigs"))
    best = None
    valid = 0
    attempt = 0
    max_attempts = cfg.kmeans_restarts * 10 + 20
    while valid < cfg.kmeans_restarts and attempt < max_attempts:
        rng = np.random.Generator(np.random.PCG64(
            derive_seed(cfg.kmeans_seed, f"kmeans:{attempt}")))
        attempt += 1
        run = _kmeans_once(X, cfg.k, rng)
        if run is None:
            continue
        valid += 1
        labels, wcss = run
        if best is None or wcss < best[1]:
            best = (labels, wcss)
    if best is None:
        raise RuntimeError(
            f"k-means produced an empty cluster in all {attempt} attempts")
    return Partition(g.node_ids, best[0], cfg.k)


# -- correlation ---------------------------------------------------------


def is_delta_good(u, cluster, delta: float, g: SignedDiGraph) -> bool:
    """Cleanliness test for node u against a node set.

    True iff u has at least (1-delta)|C| positive neighbors inside C and at
    most delta|C| outside, with positive neighborhoods read off the
    symmetrized sign structure and every node counting itself.
    """
    members = {int(x) for x in cluster}
    if not members:
        raise ValueError("cluster must be nonempty")
    pos = positive_sign_adjacency(g)
    ui = g.index_of(u)
    row = pos.indices[pos.indptr[ui]:pos.indptr[ui + 1]]
    neigh_ids = {int(g.node_ids[j]) for j in row}
    inside = len(neigh_ids & members)
    outside = len(neigh_ids) - inside
    size = len(members)
    return inside >= (1.0 - delta) * size and outside <= delta * size


def correlation_cluster(g: SignedDiGraph, cfg: CorrelationConfig) -> Partition:
    """Cautious delta-clean clustering.

    Each round pivots on an unclustered node (highest positive degree in
    the remaining subgraph, or lowest node id, per config), grows its
    candidate set through the 3delta-removal / 7delta-addition steps of
    the cautious procedure, and retires the set as a cluster. A pivot
    whose set collapses becomes a singleton. Deterministic given cfg.
    """
    n = g.num_nodes
    if n == 0:
        return Partition(g.node_ids, np.empty(0, dtype=np.int64), 0)
    pos = positive_sign_adjacency(g)
    labels = np.full(n, -1, dtype=np.int64)
    unclustered = np.arange(n)
    next_label = 0
    while unclustered.size:
        sub = pos[unclustered][:, unclustered].tocsr()
        sub.sort_indices()
        indptr = sub.indptr.astype(np.int64)
        indices = sub.indices.astype(np.int32)
        if cfg.pivot_order == "max_positive_degree":
            pivot_local = int(np.argmax(np.diff(indptr)))
        else:
            pivot_local = 0
        member = _kernels.cautious_round(indptr, indices, pivot_local,
                                         cfg.delta, unclustered.size)
        member = np.asarray(member, dtype=bool)
        if not member.any():
            member[pivot_local] = True  # collapsed set: pivot goes alone
        labels[unclustered[member]] = next_label
        next_label += 1
        unclustered = unclustered[~member]
    return Partition(g.node_ids, labels, next_label)


def disagreements(g: SignedDiGraph, p: Partition) -> float:
    """Objective the correlation method minimizes, on observed edges:
    |weight| of negative edges inside clusters plus weight of positive
    edges crossing clusters."""
    check_coverage(g, p)
    obs = ~g.predicted
    w = g.weight[obs]
    same = p.labels[g.src[obs]] == p.labels[g.dst[obs]]
    neg_inside = np.abs(w[(w < 0) & same]).sum()
    pos_across = w[(w > 0) & ~same].sum()
    return float(neg_inside + pos_across)


def check_coverage(g: SignedDiGraph, p: Partition) -> None:
    if not np.array_equal(p.node_ids, g.node_ids):
        raise ValueError("partition does not cover graph")
