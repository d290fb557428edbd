"""Community trustworthiness: agreements mass over an expansion denominator.

A cluster earns credit for positive weight kept inside and for the
absolute weight of negative edges it pushes across its boundary,
normalized by max(|C|, N - |C|) so that neither tiny nor engulfing
clusters can dominate. Only observed edges count; predicted edges exist
solely to help clustering. Crossing negative edges credit both incident
clusters, and the network total is the plain sum over clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import Partition, check_coverage
from .graph import SignedDiGraph


@dataclass(frozen=True)
class ClusterTrustRow:
    cluster_index: int
    num_nodes: int
    inside_positive_count: int
    outside_negative_count: int
    inside_positive_weight_sum: float
    outside_negative_abs_weight_sum: float
    trust: float

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster_index,
            "num_nodes": self.num_nodes,
            "inside_positive_edges": self.inside_positive_count,
            "outside_negative_edges": self.outside_negative_count,
            "inside_positive_weight": self.inside_positive_weight_sum,
            "outside_negative_abs_weight": self.outside_negative_abs_weight_sum,
            "trust": self.trust,
        }


@dataclass(frozen=True)
class TrustReport:
    rows: list  # ClusterTrustRow, sorted by trust descending
    total_nodes: int
    total_trust: float

    def row_for(self, cluster_index: int) -> ClusterTrustRow:
        for row in self.rows:
            if row.cluster_index == cluster_index:
                return row
        raise KeyError(f"no cluster {cluster_index} in report")

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "total_nodes": self.total_nodes,
            "total_clusters": len(self.rows),
            "total_trust": self.total_trust,
        }


def _accumulate(g: SignedDiGraph, p: Partition):
    """Per-cluster inside-positive and boundary-negative tallies."""
    k = p.num_clusters
    obs = ~g.predicted
    w = g.weight[obs]
    ls = p.labels[g.src[obs]]
    ld = p.labels[g.dst[obs]]

    pos_in = (w > 0) & (ls == ld)
    in_pos_w = np.bincount(ls[pos_in], weights=w[pos_in], minlength=k)
    in_pos_n = np.bincount(ls[pos_in], minlength=k)

    neg_x = (w < 0) & (ls != ld)
    absw = np.abs(w[neg_x])
    out_neg_w = (np.bincount(ls[neg_x], weights=absw, minlength=k)
                 + np.bincount(ld[neg_x], weights=absw, minlength=k))
    out_neg_n = (np.bincount(ls[neg_x], minlength=k)
                 + np.bincount(ld[neg_x], minlength=k))

    sizes = p.sizes()
    denom = np.maximum(sizes, g.num_nodes - sizes)
    trust = (in_pos_w + out_neg_w) / denom
    return sizes, in_pos_n, out_neg_n, in_pos_w, out_neg_w, trust


def _row(i, sizes, in_pos_n, out_neg_n, in_pos_w, out_neg_w, trust):
    return ClusterTrustRow(
        cluster_index=int(i),
        num_nodes=int(sizes[i]),
        inside_positive_count=int(in_pos_n[i]),
        outside_negative_count=int(out_neg_n[i]),
        inside_positive_weight_sum=float(in_pos_w[i]),
        outside_negative_abs_weight_sum=float(out_neg_w[i]),
        trust=float(trust[i]),
    )


def cluster_trust(g: SignedDiGraph, p: Partition, i: int) -> ClusterTrustRow:
    """Trust row for one cluster; direction is ignored for membership."""
    check_coverage(g, p)
    if not 0 <= i < p.num_clusters:
        raise KeyError(f"no cluster {i} in partition")
    return _row(i, *_accumulate(g, p))


def trust_report(g: SignedDiGraph, p: Partition) -> TrustReport:
    """All cluster rows, highest trust first, plus the network total."""
    check_coverage(g, p)
    parts = _accumulate(g, p)
    rows = [_row(i, *parts) for i in range(p.num_clusters)]
    rows.sort(key=lambda r: -r.trust)  # stable: ties stay in index order
    total = float(sum(r.trust for r in rows))
    return TrustReport(rows=rows, total_nodes=g.num_nodes, total_trust=total)


def best_community(report: TrustReport) -> int:
    """Cluster index with maximum trust; ties go to the smaller index."""
    if not report.rows:
        raise ValueError("empty trust report")
    best = report.rows[0]
    for row in report.rows[1:]:
        if row.trust > best.trust or (row.trust == best.trust
                                      and row.cluster_index < best.cluster_index):
            best = row
    return best.cluster_index
