"""Trustworthiness and resiliency analytics for signed trust networks."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .cluster import (CorrelationConfig, Partition, SpectralConfig,
                      correlation_cluster, disagreements, is_delta_good,
                      signed_laplacian, spectral_cluster, spectral_embed)
from .graph import (IngestError, SignedDiGraph, SignedEdge, ingest_csv,
                    remove_nodes, sample_nodes, sample_temporal_prefix,
                    subgraph_by_time, symmetrize, to_csv)
from .linkpred import (FGConfig, FGScores, densify, fairness_goodness,
                       predict_edge)
from .resiliency import (AblationResult, LinkPredictionEval, MethodComparison,
                         PipelineConfig, ResiliencyReport, YearwiseSeries,
                         compare_methods, eval_link_prediction,
                         eval_positive_only_ablation, mae_baseline,
                         run_pipeline, yearwise)
from .trust import (ClusterTrustRow, TrustReport, best_community,
                    cluster_trust, trust_report)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "SignedDiGraph", "SignedEdge", "IngestError", "ingest_csv", "to_csv",
    "subgraph_by_time", "remove_nodes", "symmetrize",
    "sample_temporal_prefix", "sample_nodes",
    "FGConfig", "FGScores", "fairness_goodness", "predict_edge", "densify",
    "Partition", "SpectralConfig", "CorrelationConfig", "signed_laplacian",
    "spectral_embed", "spectral_cluster", "is_delta_good",
    "correlation_cluster", "disagreements",
    "ClusterTrustRow", "TrustReport", "cluster_trust", "trust_report",
    "best_community",
    "PipelineConfig", "ResiliencyReport", "YearwiseSeries",
    "LinkPredictionEval", "AblationResult", "MethodComparison",
    "run_pipeline", "mae_baseline", "yearwise", "eval_link_prediction",
    "eval_positive_only_ablation", "compare_methods",
]
