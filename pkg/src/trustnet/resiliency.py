"""End-to-end resiliency pipeline and the evaluation operations.

The disruption event removes the nodes of the most trustworthy community,
link predictions are recomputed on the survivors, the survivor graph is
re-clustered (hyperparameters may differ per phase), and the resiliency
score is the drop in total network trustworthiness. A prediction-shift
MAE over the surviving edges serves as the baseline metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import (CorrelationConfig, Partition, SpectralConfig,
                      correlation_cluster, spectral_cluster)
from .graph import SignedDiGraph, _from_edge_subset, remove_nodes, temporal_order
from .linkpred import FGConfig, FGScores, densify, fairness_goodness
from .trust import TrustReport, best_community, trust_report

METHODS = ("spectral", "correlation")


@dataclass(frozen=True)
class PipelineConfig:
    method: str
    original: SpectralConfig | CorrelationConfig
    disrupted: SpectralConfig | CorrelationConfig
    fg: FGConfig = field(default_factory=FGConfig)
    densify_mode: str | None = "missing_only"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown clustering method {self.method!r}")
        want = SpectralConfig if self.method == "spectral" else CorrelationConfig
        for phase, cfg in (("original", self.original), ("disrupted", self.disrupted)):
            if not isinstance(cfg, want):
                raise ValueError(
                    f"{phase} phase config must be a {want.__name__} "
                    f"for method {self.method!r}")


@dataclass(frozen=True)
class ResiliencyReport:
    trust_original: float
    trust_disrupted: float
    r_minus: float
    removed_cluster_index: int
    removed_cluster_size: int
    mae_baseline: float
    original_report: TrustReport
    disrupted_report: TrustReport

    def to_dict(self) -> dict:
        return {
            "trust_original": self.trust_original,
            "trust_disrupted": self.trust_disrupted,
            "r_minus": self.r_minus,
            "removed_cluster": {
                "index": self.removed_cluster_index,
                "num_nodes": self.removed_cluster_size,
            },
            "mae_baseline": self.mae_baseline,
            "original_report": self.original_report.to_dict(),
            "disrupted_report": self.disrupted_report.to_dict(),
        }


def _cluster(g: SignedDiGraph, method: str, cfg) -> Partition:
    if method == "spectral":
        return spectral_cluster(g, cfg)
    return correlation_cluster(g, cfg)


def _clustering_view(g: SignedDiGraph, scores: FGScores, mode):
    return densify(g, scores, mode) if mode else g


def run_pipeline(g: SignedDiGraph, cfg: PipelineConfig) -> ResiliencyReport:
    """Baseline analysis, disruption, re-analysis, resiliency score."""
    if g.num_nodes == 0:
        raise ValueError("cannot run the pipeline on an empty graph")

    scores = fairness_goodness(g, cfg.fg)
    p_orig = _cluster(_clustering_view(g, scores, cfg.densify_mode),
                      cfg.method, cfg.original)
    rep_orig = trust_report(g, p_orig)
    target = best_community(rep_orig)
    victims = p_orig.members(target)
    if victims.size >= g.num_nodes:
        raise ValueError("disruption removed entire network")

    survivors = remove_nodes(g, victims)
    scores_after = fairness_goodness(survivors, cfg.fg)
    p_disr = _cluster(_clustering_view(survivors, scores_after, cfg.densify_mode),
                      cfg.method, cfg.disrupted)
    rep_disr = trust_report(survivors, p_disr)

    t0 = rep_orig.total_trust
    t1 = rep_disr.total_trust
    return ResiliencyReport(
        trust_original=t0,
        trust_disrupted=t1,
        r_minus=t0 - t1,
        removed_cluster_index=int(target),
        removed_cluster_size=int(victims.size),
        mae_baseline=_mae_from_scores(g, survivors, scores, scores_after),
        original_report=rep_orig,
        disrupted_report=rep_disr,
    )


# -- baseline metric -----------------------------------------------------


def _mae_from_scores(g_before, g_after, scores_before, scores_after) -> float:
    obs = ~g_after.predicted
    src, dst = g_after.src[obs], g_after.dst[obs]
    if src.size == 0:
        raise ValueError("no surviving edges to compare predictions on")
    raw_src = g_after.node_ids[src]
    raw_dst = g_after.node_ids[dst]
    bsrc = np.searchsorted(g_before.node_ids, raw_src)
    bdst = np.searchsorted(g_before.node_ids, raw_dst)
    before = scores_before.fairness[bsrc] * scores_before.goodness[bdst]
    after = scores_after.fairness[src] * scores_after.goodness[dst]
    return float(np.abs(before - after).mean())


def mae_baseline(g_before: SignedDiGraph, g_after: SignedDiGraph,
                 fg_cfg: FGConfig = FGConfig()) -> float:
    """Mean absolute prediction shift over pairs still observed afterwards."""
    missing = set(map(int, g_after.node_ids)) - set(map(int, g_before.node_ids))
    if missing:
        raise ValueError(f"g_after contains nodes not in g_before: {sorted(missing)[:5]}")
    scores_before = fairness_goodness(g_before, fg_cfg)
    scores_after = fairness_goodness(g_after, fg_cfg)
    return _mae_from_scores(g_before, g_after, scores_before, scores_after)


# -- temporal evaluations -------------------------------------------------


@dataclass(frozen=True)
class YearEntry:
    year: int
    r_minus: float
    mae: float
    num_nodes: int
    num_edges: int


@dataclass(frozen=True)
class YearwiseSeries:
    entries: list  # YearEntry, years strictly increasing
    skipped: list  # (year, reason) for years the pipeline could not run

    def to_dict(self) -> dict:
        return {
            "entries": [vars(e) for e in self.entries],
            "skipped": [{"year": y, "reason": r} for y, r in self.skipped],
        }


def _edge_years(g: SignedDiGraph) -> np.ndarray:
    stamps = g.timestamp.astype("datetime64[s]")
    return stamps.astype("datetime64[Y]").astype(np.int64) + 1970


def yearwise(g: SignedDiGraph, cfg: PipelineConfig,
             mode: str = "cumulative") -> YearwiseSeries:
    """Resiliency score per UTC calendar year.

    cumulative runs the pipeline on the network as grown up to each year's
    end; slice uses only that year's edges. Years where the pipeline
    cannot run (too few nodes for k, disruption emptying the graph, ...)
    are recorded as skipped.
    """
    if mode not in ("cumulative", "slice"):
        raise ValueError(f"unknown yearwise mode {mode!r}")
    years = _edge_years(g)
    entries = []
    skipped = []
    for year in sorted(set(int(y) for y in years)):
        keep = years <= year if mode == "cumulative" else years == year
        sub = _from_edge_subset(g, keep)
        try:
            report = run_pipeline(sub, cfg)
        except (ValueError, RuntimeError) as exc:
            skipped.append((year, str(exc)))
            continue
        entries.append(YearEntry(year=year, r_minus=report.r_minus,
                                 mae=report.mae_baseline,
                                 num_nodes=sub.num_nodes,
                                 num_edges=sub.num_edges))
    return YearwiseSeries(entries=entries, skipped=skipped)


@dataclass(frozen=True)
class LinkPredictionEval:
    train_edges: int
    test_edges: int
    num_predicted: int
    num_unpredictable: int
    mae: float

    def to_dict(self) -> dict:
        return vars(self).copy()


def eval_link_prediction(g: SignedDiGraph, train_fraction: float,
                         fg_cfg: FGConfig = FGConfig()) -> LinkPredictionEval:
    """Temporal split: fit on the earliest floor(frac*E) edges, score the rest.

    Test edges whose endpoints never appear in the training prefix cannot
    be predicted; they are excluded from the MAE and counted separately.
    """
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    order = temporal_order(g)
    n_train = int(np.floor(train_fraction * g.num_edges))
    if n_train == 0:
        raise ValueError("training prefix is empty")
    if n_train == g.num_edges:
        raise ValueError("test set is empty")
    train_mask = np.zeros(g.num_edges, dtype=bool)
    train_mask[order[:n_train]] = True

    train_g = _from_edge_subset(g, train_mask)
    scores = fairness_goodness(train_g, fg_cfg)

    test = np.flatnonzero(~train_mask)
    raw_src = g.node_ids[g.src[test]]
    raw_dst = g.node_ids[g.dst[test]]
    ts = np.searchsorted(train_g.node_ids, raw_src).clip(max=train_g.num_nodes - 1)
    td = np.searchsorted(train_g.node_ids, raw_dst).clip(max=train_g.num_nodes - 1)
    known = (train_g.node_ids[ts] == raw_src) & (train_g.node_ids[td] == raw_dst)
    if not known.any():
        raise ValueError("no test edge has both endpoints in the training prefix")

    predicted = scores.fairness[ts[known]] * scores.goodness[td[known]]
    actual = g.weight[test][known]
    return LinkPredictionEval(
        train_edges=n_train,
        test_edges=int(test.size),
        num_predicted=int(known.sum()),
        num_unpredictable=int((~known).sum()),
        mae=float(np.abs(predicted - actual).mean()),
    )


@dataclass(frozen=True)
class AblationResult:
    trust_positive_only: float
    trust_signed: float

    def to_dict(self) -> dict:
        return vars(self).copy()


def eval_positive_only_ablation(g: SignedDiGraph,
                                cfg: SpectralConfig) -> AblationResult:
    """Cluster the positive-only subgraph vs the full signed graph.

    Both partitions are scored on the full graph. Nodes absent from the
    positive subgraph (only-negative raters) are appended as singleton
    clusters so the positive-only partition still covers the graph.
    """
    pos_mask = g.weight > 0
    g_pos = _from_edge_subset(g, pos_mask)
    if g_pos.num_nodes < cfg.k:
        raise ValueError(
            f"positive subgraph has {g_pos.num_nodes} nodes, fewer than k={cfg.k}")
    p_pos_sub = spectral_cluster(g_pos, cfg)

    labels = np.full(g.num_nodes, -1, dtype=np.int64)
    present = np.searchsorted(g.node_ids, g_pos.node_ids)
    labels[present] = p_pos_sub.labels
    extra = np.flatnonzero(labels < 0)
    labels[extra] = cfg.k + np.arange(extra.size)
    p_pos = Partition(g.node_ids, labels, cfg.k + extra.size)
    p_signed = spectral_cluster(g, cfg)
    return AblationResult(
        trust_positive_only=trust_report(g, p_pos).total_trust,
        trust_signed=trust_report(g, p_signed).total_trust,
    )


@dataclass(frozen=True)
class MethodComparison:
    trust_spectral: float
    trust_correlation: float
    correlation_not_worse: bool

    def to_dict(self) -> dict:
        return vars(self).copy()


def compare_methods(g: SignedDiGraph, spectral_cfg: SpectralConfig,
                    correlation_cfg: CorrelationConfig,
                    fg_cfg: FGConfig = FGConfig(),
                    densify_mode: str | None = "missing_only") -> MethodComparison:
    """Total trust under both clustering methods on the same graph.

    The expectation (not a theorem) is that correlation clustering scores
    at least as high; the flag records whether that held for this run.
    """
    scores = fairness_goodness(g, fg_cfg)
    view = _clustering_view(g, scores, densify_mode)
    t_spec = trust_report(g, spectral_cluster(view, spectral_cfg)).total_trust
    t_corr = trust_report(g, correlation_cluster(view, correlation_cfg)).total_trust
    return MethodComparison(
        trust_spectral=t_spec,
        trust_correlation=t_corr,
        correlation_not_worse=t_corr >= t_spec,
    )
