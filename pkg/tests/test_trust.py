import numpy as np
import pytest

from trustnet import (ClusterTrustRow, Partition, SignedDiGraph, TrustReport,
                      best_community, cluster_trust, trust_report)

from _oracles import trust_of_cluster
from conftest import random_digraph


def partition_of(g, blocks):
    label = {}
    for ci, block in enumerate(blocks):
        for n in block:
            label[n] = ci
    return Partition.from_map(label), label


def test_singleton_with_no_edges_is_zero():
    g = SignedDiGraph.from_raw_edges([(1, 2, 0.5, 1), (2, 1, 0.5, 2),
                                      (3, 1, 0.0001, 3)])
    # node 3 rates node 1 but receives nothing; make it a singleton that
    # still has an incident positive (not negative) edge: trust must be 0
    p, _ = partition_of(g, [[1, 2], [3]])
    row = cluster_trust(g, p, 1)
    assert row.trust == 0.0
    assert row.inside_positive_count == 0
    assert row.outside_negative_count == 0


def test_whole_graph_single_cluster_all_positive():
    rows = [(u, v, 1.0, 10 * u + v) for u in range(1, 5)
            for v in range(1, 5) if u != v]
    g = SignedDiGraph.from_raw_edges(rows)
    p = Partition(g.node_ids, np.zeros(4, dtype=np.int64), 1)
    row = cluster_trust(g, p, 0)
    assert row.trust == pytest.approx(len(rows) / 4)  # denominator max(N, 0)


def test_six_node_worked_example():
    g = SignedDiGraph.from_raw_edges([
        (1, 2, 0.5, 1), (2, 3, 0.5, 2), (3, 4, -1.0, 3),
        (5, 6, 0.0001, 4),  # keeps nodes 5,6 in the graph
    ])
    p, _ = partition_of(g, [[1, 2, 3], [4, 5, 6]])
    row = cluster_trust(g, p, 0)
    assert row.inside_positive_weight_sum == pytest.approx(1.0)
    assert row.outside_negative_abs_weight_sum == pytest.approx(1.0)
    assert row.trust == pytest.approx(2.0 / 3.0, abs=1e-12)
    # the crossing negative credits the other side too
    other = cluster_trust(g, p, 1)
    assert other.outside_negative_abs_weight_sum == pytest.approx(1.0)


def test_matches_bruteforce_oracle_random():
    rng = np.random.Generator(np.random.PCG64(51))
    for _ in range(100):
        g, arcs = random_digraph(rng, 12, p=0.3)
        k = int(rng.integers(1, 5))
        labels = rng.integers(0, k, size=g.num_nodes)
        # force non-empty clusters
        labels[:k] = np.arange(k)
        p = Partition(g.node_ids, labels, k)
        i = int(rng.integers(k))
        members = {int(n) for n, c in zip(g.node_ids, labels) if c == i}
        ref = trust_of_cluster(arcs, members, g.num_nodes)
        row = cluster_trust(g, p, i)
        assert row.trust == pytest.approx(ref["trust"], abs=1e-12)
        assert row.inside_positive_weight_sum == pytest.approx(
            ref["inside_positive_weight"], abs=1e-12)
        assert row.outside_negative_abs_weight_sum == pytest.approx(
            ref["outside_negative_abs_weight"], abs=1e-12)
        assert row.inside_positive_count == ref["inside_positive_count"]
        assert row.outside_negative_count == ref["outside_negative_count"]


def test_monotonicity_adding_edges():
    base = [(1, 2, 0.5, 1), (3, 4, 0.5, 2), (1, 4, -0.5, 3)]
    g0 = SignedDiGraph.from_raw_edges(base)
    p0, _ = partition_of(g0, [[1, 2], [3, 4]])
    before = cluster_trust(g0, p0, 0).trust

    g_in = SignedDiGraph.from_raw_edges(base + [(2, 1, 0.9, 4)])
    assert cluster_trust(g_in, p0, 0).trust >= before

    g_x = SignedDiGraph.from_raw_edges(base + [(2, 3, -0.9, 4)])
    assert cluster_trust(g_x, p0, 0).trust >= before
    assert cluster_trust(g_x, p0, 1).trust >= cluster_trust(g0, p0, 1).trust


def test_permutation_invariance():
    rng = np.random.Generator(np.random.PCG64(52))
    g, arcs = random_digraph(rng, 10, p=0.4)
    labels = rng.integers(0, 3, size=10)
    labels[:3] = [0, 1, 2]
    p = Partition(g.node_ids, labels, 3)
    rep = trust_report(g, p)

    # relabel node ids (shift by 1000) and permute cluster indices
    remap = {0: 2, 1: 0, 2: 1}
    g2 = SignedDiGraph.from_raw_edges(
        [(u + 1000, v + 1000, w, k) for k, (u, v, w) in enumerate(arcs)])
    p2 = Partition(g2.node_ids,
                   np.array([remap[int(c)] for c in labels]), 3)
    rep2 = trust_report(g2, p2)
    assert sorted(r.trust for r in rep.rows) == pytest.approx(
        sorted(r.trust for r in rep2.rows), abs=1e-15)
    assert rep.total_trust == pytest.approx(rep2.total_trust, abs=1e-15)


def test_all_singletons_all_positive_total_zero():
    rows = [(u, v, 0.7, 10 * u + v) for u in range(1, 6)
            for v in range(1, 6) if u != v]
    g = SignedDiGraph.from_raw_edges(rows)
    p = Partition(g.node_ids, np.arange(5, dtype=np.int64), 5)
    rep = trust_report(g, p)
    assert rep.total_trust == 0.0
    assert all(r.trust == 0.0 for r in rep.rows)


def test_report_sorted_and_total_exact(dc_full):
    p, _ = partition_of(dc_full, [[1, 2, 3, 4], [5, 6, 7, 8]])
    rep = trust_report(dc_full, p)
    trusts = [r.trust for r in rep.rows]
    assert trusts == sorted(trusts, reverse=True)
    assert rep.total_trust == sum(r.trust for r in rep.rows)
    assert rep.total_trust == pytest.approx(22.0)  # (12 + 32) / 4 per clique


def test_count_weight_consistency_random():
    rng = np.random.Generator(np.random.PCG64(53))
    for _ in range(20):
        g, _ = random_digraph(rng, 10, p=0.3)
        labels = rng.integers(0, 2, size=10)
        labels[:2] = [0, 1]
        p = Partition(g.node_ids, labels, 2)
        for row in trust_report(g, p).rows:
            assert (row.inside_positive_count == 0) == \
                (row.inside_positive_weight_sum == 0.0)
            assert (row.outside_negative_count == 0) == \
                (row.outside_negative_abs_weight_sum == 0.0)


def row(i, trust):
    return ClusterTrustRow(i, 1, 0, 0, 0.0, 0.0, trust)


def test_best_community_tie_breaks():
    rep = TrustReport(rows=[row(1, 0.56), row(2, 0.06), row(0, 0.01)],
                      total_nodes=3, total_trust=0.63)
    assert best_community(rep) == 1
    ties = TrustReport(rows=[row(2, 0.5), row(4, 0.5)], total_nodes=2,
                       total_trust=1.0)
    assert best_community(ties) == 2
    zeros = TrustReport(rows=[row(i, 0.0) for i in range(3)], total_nodes=3,
                        total_trust=0.0)
    assert best_community(zeros) == 0
    with pytest.raises(ValueError, match="empty"):
        best_community(TrustReport(rows=[], total_nodes=0, total_trust=0.0))


def test_unknown_cluster_index(dc_full):
    p, _ = partition_of(dc_full, [[1, 2, 3, 4], [5, 6, 7, 8]])
    with pytest.raises(KeyError, match="7"):
        cluster_trust(dc_full, p, 7)


def test_predicted_edges_do_not_count(dc_full):
    from trustnet import densify, fairness_goodness

    p, _ = partition_of(dc_full, [[1, 2, 3, 4], [5, 6, 7, 8]])
    base = trust_report(dc_full, p).total_trust
    dense = densify(dc_full, fairness_goodness(dc_full), "all_pairs_capped")
    assert trust_report(dense, p).total_trust == base
