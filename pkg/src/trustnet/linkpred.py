"""Fairness-goodness fixed point and edge-weight prediction.

Goodness averages incoming fairness-weighted ratings; fairness penalizes a
rater by the averaged magnitude of rating-times-goodness over its
out-edges. The two are iterated to a joint fixed point and an unobserved
edge u->v is predicted as fairness(u) * goodness(v).

The fairness sweep applies relaxation 0.5 toward the freshly computed
values: the plain alternating recompute is not a contraction when edge
weights reach magnitude 1 (a single unit-weight edge makes it flip-flop
forever), while the relaxed sweep converges to the same fixed point.
Residuals are measured on the full, unrelaxed update, so convergence means
the returned scores satisfy the defining equations to within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import SignedDiGraph

_RELAXATION = 0.5


@dataclass(frozen=True)
class FGConfig:
    max_iterations: int = 100
    tolerance: float = 1e-6
    range_constant: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.range_constant <= 0:
            raise ValueError("range_constant must be positive")


@dataclass(frozen=True)
class FGScores:
    """Per-node fairness in [0,1] and goodness in [-1,1], dense order."""

    node_ids: np.ndarray
    fairness: np.ndarray
    goodness: np.ndarray
    iterations_run: int
    converged: bool

    def _idx(self, node_id):
        hits = np.searchsorted(self.node_ids, int(node_id))
        if hits >= self.node_ids.size or self.node_ids[hits] != int(node_id):
            raise KeyError(f"node {node_id} has no scores")
        return hits

    def fairness_of(self, node_id) -> float:
        return float(self.fairness[self._idx(node_id)])

    def goodness_of(self, node_id) -> float:
        return float(self.goodness[self._idx(node_id)])

    def fairness_map(self) -> dict:
        return {int(n): float(v) for n, v in zip(self.node_ids, self.fairness)}

    def goodness_map(self) -> dict:
        return {int(n): float(v) for n, v in zip(self.node_ids, self.goodness)}


def _sweep_goodness(g, fairness, indeg):
    sums = _kernels.goodness_sums(g.src, g.dst, g.weight, fairness, g.num_nodes)
    with np.errstate(invalid="ignore"):
        vals = np.where(indeg > 0, sums / np.maximum(indeg, 1), 0.0)
    return np.clip(vals, -1.0, 1.0)


def _sweep_fairness(g, goodness, outdeg, R):
    sums = _kernels.fairness_sums(g.src, g.dst, g.weight, goodness, g.num_nodes)
    vals = np.where(outdeg > 0, 1.0 - sums / (R * np.maximum(outdeg, 1)), 1.0)
    return np.clip(vals, 0.0, 1.0)


def fairness_goodness(g: SignedDiGraph, cfg: FGConfig = FGConfig()) -> FGScores:
    """Run the fixed-point iteration on g.

    Starts from all-ones fairness and goodness. Nodes with no in-edges get
    goodness 0 (no evidence of reputation); nodes with no out-edges keep
    fairness 1 (no evidence of unfairness). Deterministic: sweeps accumulate
    in the graph's canonical edge order.
    """
    if g.num_nodes == 0:
        raise ValueError("fairness_goodness requires a nonempty graph")
    indeg = g.in_degrees()
    outdeg = g.out_degrees()
    f = np.ones(g.num_nodes)
    gd = np.ones(g.num_nodes)

    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iterations + 1):
        gd_new = _sweep_goodness(g, f, indeg)
        f_new = _sweep_fairness(g, gd_new, outdeg, cfg.range_constant)
        residual = max(np.abs(gd_new - gd).max(initial=0.0),
                       np.abs(f_new - f).max(initial=0.0))
        f = f + _RELAXATION * (f_new - f)
        gd = gd_new
        if residual < cfg.tolerance:
            converged = True
            break

    # final sync so the returned goodness exactly matches the returned fairness
    gd = _sweep_goodness(g, f, indeg)
    return FGScores(g.node_ids, f, gd, iterations, converged)


def predict_edge(scores: FGScores, u, v) -> float:
    """Predicted weight of arc u->v: fairness(u) * goodness(v)."""
    if int(u) == int(v):
        raise ValueError("cannot predict a self-rating")
    return scores.fairness_of(u) * scores.goodness_of(v)


def predict_many(scores: FGScores, src_idx, dst_idx) -> np.ndarray:
    """Vectorized predict_edge over dense-index arrays."""
    return scores.fairness[src_idx] * scores.goodness[dst_idx]


DENSIFY_MODES = ("missing_only", "all_pairs_capped")

# all-pairs refusal threshold: N*N ordered pairs
DEFAULT_PAIR_BUDGET = 4_000_000


def densify(g: SignedDiGraph, scores: FGScores, mode: str = "missing_only",
            max_pairs: int = DEFAULT_PAIR_BUDGET) -> SignedDiGraph:
    """Add predicted edges for unobserved ordered pairs.

    missing_only restricts to pairs within undirected distance 2 (which
    covers every balance-theory triad); all_pairs_capped predicts every
    missing ordered pair but refuses outright when N^2 exceeds max_pairs.
    Observed edges are never touched; added edges carry predicted=True and
    timestamp 0. Exact-zero predictions are skipped (no trust signal, and
    they would contribute nothing but bulk).
    """
    if mode not in DENSIFY_MODES:
        raise ValueError(f"unknown densify mode {mode!r}")
    if not np.array_equal(scores.node_ids, g.node_ids):
        raise ValueError("scores were not computed on this graph")
    n = g.num_nodes
    if n == 0:
        return g

    if mode == "all_pairs_capped":
        if n * n > max_pairs:
            raise ValueError(
                f"all-pairs densification needs {n * n} pairs, over the "
                f"budget of {max_pairs}; use missing_only instead")
        uu, vv = np.meshgrid(np.arange(n, dtype=np.int64),
                             np.arange(n, dtype=np.int64), indexing="ij")
        cand_u = uu.ravel()
        cand_v = vv.ravel()
    else:
        import scipy.sparse as sp

        rows = np.concatenate([g.src, g.dst, np.arange(n, dtype=np.int32)])
        cols = np.concatenate([g.dst, g.src, np.arange(n, dtype=np.int32)])
        structure = sp.csr_matrix(
            (np.ones(rows.size, dtype=np.int32), (rows, cols)), shape=(n, n))
        structure.data[:] = 1
        reach2 = (structure @ structure).tocoo()
        cand_u = reach2.row.astype(np.int64)
        cand_v = reach2.col.astype(np.int64)

    keep = cand_u != cand_v
    cand_u, cand_v = cand_u[keep], cand_v[keep]
    cand_key = cand_u * n + cand_v
    observed_key = g.src.astype(np.int64) * n + g.dst
    keep = ~np.isin(cand_key, observed_key)
    cand_u, cand_v = cand_u[keep], cand_v[keep]

    pred_w = scores.fairness[cand_u] * scores.goodness[cand_v]
    keep = pred_w != 0.0
    cand_u, cand_v, pred_w = cand_u[keep], cand_v[keep], pred_w[keep]

    return SignedDiGraph(
        g.node_ids,
        np.concatenate([g.src, cand_u.astype(np.int32)]),
        np.concatenate([g.dst, cand_v.astype(np.int32)]),
        np.concatenate([g.weight, pred_w]),
        np.concatenate([g.timestamp, np.zeros(cand_u.size, dtype=np.int64)]),
        np.concatenate([g.predicted, np.ones(cand_u.size, dtype=bool)]),
    )
