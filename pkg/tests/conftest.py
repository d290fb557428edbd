import os
from pathlib import Path

import numpy as np
import pytest

from trustnet import SignedDiGraph, ingest_csv

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_CSV = REPO_ROOT / "data" / "fixtures" / "double_clique.csv"


def both_ways(rows, t, u, v, w):
    rows.append((u, v, w, t[0]))
    t[0] += 1
    rows.append((v, u, w, t[0]))
    t[0] += 1


def build_double_clique(cross="full"):
    """Two all-positive directed 4-cliques, negative cross edges.

    cross="full": every cross pair negative (the correlation fixture).
    cross="matched": a negative perfect matching only; this keeps the
    signed spectrum non-degenerate so spectral recovery is well-posed.
    """
    rows, t = [], [1]
    A, B = [1, 2, 3, 4], [5, 6, 7, 8]
    for grp in (A, B):
        for i, u in enumerate(grp):
            for v in grp[i + 1:]:
                both_ways(rows, t, u, v, 1.0)
    pairs = [(u, v) for u in A for v in B] if cross == "full" else list(zip(A, B))
    for u, v in pairs:
        both_ways(rows, t, u, v, -1.0)
    return SignedDiGraph.from_raw_edges(rows)


def build_triple_clique():
    """Three positive 4-cliques; dense negatives P1-P2 with 4 positive
    bridges, and one weak positive bridge P2-P3. The positive-only view
    sees its cheapest cut at the weak bridge, the signed view at the
    negative wall, so the two clusterings genuinely differ."""
    rows, t = [], [1]
    P1, P2, P3 = [1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12]
    for grp in (P1, P2, P3):
        for i, u in enumerate(grp):
            for v in grp[i + 1:]:
                both_ways(rows, t, u, v, 1.0)
    bridges = list(zip(P1, P2))
    for u, v in bridges:
        both_ways(rows, t, u, v, 1.0)
    for u in P1:
        for v in P2:
            if (u, v) not in bridges:
                both_ways(rows, t, u, v, -1.0)
    both_ways(rows, t, 8, 9, 1.0)
    return SignedDiGraph.from_raw_edges(rows)


def random_digraph(rng, n, p=0.3, unit_weights=False, base_id=1):
    """Random directed signed graph; returns (graph, raw arcs)."""
    rows = []
    t = 1
    for u in range(n):
        for v in range(n):
            if u == v or rng.random() >= p:
                continue
            mag = 1.0 if unit_weights else float(rng.uniform(0.1, 1.0))
            w = mag if rng.random() < 0.5 else -mag
            rows.append((base_id + u, base_id + v, w, t))
            t += 1
    if not rows:  # degenerate draw; add one arc so the graph is nonempty
        rows.append((base_id, base_id + 1, 0.5, 1))
    g = SignedDiGraph.from_raw_edges(rows)
    return g, [(u, v, w) for u, v, w, _ in rows]


@pytest.fixture
def dc_full():
    return build_double_clique("full")


@pytest.fixture
def dc_matched():
    return build_double_clique("matched")


@pytest.fixture
def triple_clique():
    return build_triple_clique()


# -- real dataset discovery (acceptance criteria 1-4) ---------------------

_OTC_CANDIDATES = [
    REPO_ROOT / "data" / "soc-sign-bitcoinotc.csv.gz",
    REPO_ROOT / "data" / "soc-sign-bitcoinotc.csv",
]


def otc_csv_path():
    env = os.environ.get("BITCOIN_OTC_CSV")
    if env:
        return Path(env)
    for cand in _OTC_CANDIDATES:
        if cand.exists():
            return cand
    return None


def require_otc():
    path = otc_csv_path()
    if path is None or not path.exists():
        pytest.skip(
            "Bitcoin OTC dataset not found: place soc-sign-bitcoinotc.csv[.gz] "
            "under data/ or set BITCOIN_OTC_CSV (download from "
            "https://snap.stanford.edu/data/soc-sign-bitcoinotc.html)")
    return ingest_csv(path)
