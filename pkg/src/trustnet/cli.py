"""Command-line front end: deterministic runs, JSON + CSV artifacts.

Every run writes its primary artifacts (byte-stable given identical
invocation and inputs) plus a manifest.json holding the reproduction
recipe; wall-clock fields live only in the manifest so the primary
artifacts stay comparable. Exit codes: 0 ok, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from ._seeds import derive_seed
from .cluster import (CorrelationConfig, Partition, SpectralConfig,
                      correlation_cluster, disagreements, spectral_cluster)
from .graph import (SignedDiGraph, ingest_csv, sample_nodes,
                    sample_temporal_prefix, to_csv)
from .linkpred import FGConfig, densify, fairness_goodness
from .resiliency import (PipelineConfig, eval_link_prediction,
                         eval_positive_only_ablation, run_pipeline, yearwise)
from .trust import trust_report


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


# -- small I/O helpers ----------------------------------------------------


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")


def read_partition_csv(path) -> Partition:
    assignment = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or (line_no == 1 and line.lower().startswith("node")):
                continue
            try:
                node_txt, cluster_txt = line.split(",")
                assignment[int(node_txt)] = int(cluster_txt)
            except ValueError:
                raise ValueError(
                    f"{path}: line {line_no}: expected `node,cluster`") from None
    return Partition.from_map(assignment)


def read_trust_csv(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            rows.append(dict(zip(header, parts)))
    return rows


def _trust_csv_rows(report):
    for r in report.rows:
        yield (r.cluster_index, r.num_nodes, r.inside_positive_count,
               r.outside_negative_count, repr(r.inside_positive_weight_sum),
               repr(r.outside_negative_abs_weight_sum), repr(r.trust))


TRUST_HEADER = ("cluster,num_nodes,inside_positive_edges,outside_negative_edges,"
                "inside_positive_weight,outside_negative_abs_weight,trust")


# -- run bookkeeping ------------------------------------------------------


class _Run:
    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.started = time.time()
        self.input_digests = {}
        self.derived_seeds = {}

    def record_input(self, path):
        self.input_digests[str(path)] = _sha256(path)

    def seed_for(self, stage: str) -> int:
        seed = derive_seed(getattr(self.args, "seed", 0) or 0, stage)
        self.derived_seeds[stage] = seed
        return seed

    @property
    def run_id(self) -> str:
        payload = json.dumps({"argv": self.argv, "inputs": self.input_digests},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def finish(self):
        manifest = {
            "argv": self.argv,
            "run_id": self.run_id,
            "inputs": self.input_digests,
            "seed": getattr(self.args, "seed", None),
            "derived_seeds": self.derived_seeds,
            "version": __version__,
            # volatile fields: never copied into primary artifacts
            "started_utc": datetime.fromtimestamp(
                self.started, tz=timezone.utc).isoformat(),
            "duration_seconds": round(time.time() - self.started, 3),
        }
        _write_json(self.out / "manifest.json", manifest)


def _load_graph(run, path, divisor) -> SignedDiGraph:
    if not Path(path).exists():
        raise FileNotFoundError(f"input file not found: {path}")
    run.record_input(path)
    g = ingest_csv(path, weight_divisor=divisor)
    sample = getattr(run.args, "sample", None)
    if sample:
        g = _apply_sample(run, g, sample)
    return g


def _apply_sample(run, g, spec: str) -> SignedDiGraph:
    parts = spec.split(":")
    try:
        if parts[0] == "temporal" and len(parts) == 2:
            return sample_temporal_prefix(g, float(parts[1]))
        if parts[0] == "node" and len(parts) in (2, 3):
            seed = int(parts[2]) if len(parts) == 3 else run.seed_for("sample")
            return sample_nodes(g, float(parts[1]), seed)
    except ValueError as exc:
        raise UsageError(f"bad --sample spec {spec!r}: {exc}") from None
    raise UsageError(
        f"bad --sample spec {spec!r} (use temporal:<frac> or node:<frac>:<seed>)")


def _load_config_file(args):
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        overrides = json.loads(path.read_text())
        if not isinstance(overrides, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"config key {key!r} matches no option")
            if getattr(args, attr) is None:
                setattr(args, attr, value)
    return args


def _val(args, name, default):
    v = getattr(args, name, None)
    return default if v is None else v


# -- subcommand bodies ----------------------------------------------------


def _cmd_ingest(run):
    a = run.args
    g = _load_graph(run, a.input, _val(a, "weight_divisor", 10.0))
    to_csv(g, run.out / "graph.csv", weight_divisor=_val(a, "weight_divisor", 10.0))
    summary = g.summary()
    summary["run_id"] = run.run_id
    _write_json(run.out / "summary.json", summary)
    print(f"ingested {summary['nodes']} nodes, {summary['edges']} edges "
          f"({summary['positive_edge_fraction']:.1%} positive)")
    return 0


def _fg_config(args):
    return FGConfig(
        max_iterations=int(_val(args, "fg_max_iterations", 100)),
        tolerance=float(_val(args, "fg_tolerance", 1e-6)),
        range_constant=float(_val(args, "range_constant", 1.0)),
    )


def _cmd_predict(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    scores = fairness_goodness(g, _fg_config(a))
    _write_csv(run.out / "scores.csv", "node,fairness,goodness",
               ((int(n), repr(float(f)), repr(float(gd)))
                for n, f, gd in zip(scores.node_ids, scores.fairness,
                                    scores.goodness)))
    mode = _val(a, "densify", "none")
    summary = {
        "run_id": run.run_id,
        "nodes": g.num_nodes,
        "iterations_run": scores.iterations_run,
        "converged": scores.converged,
    }
    if mode != "none":
        dense = densify(g, scores, mode)
        _write_csv(run.out / "densified.csv", "SOURCE,TARGET,WEIGHT,TIME,PREDICTED",
                   ((int(dense.node_ids[dense.src[i]]),
                     int(dense.node_ids[dense.dst[i]]),
                     repr(float(dense.weight[i])), int(dense.timestamp[i]),
                     int(dense.predicted[i]))
                    for i in range(dense.num_edges)))
        summary["densified_edges"] = dense.num_edges
        summary["predicted_edges"] = int(dense.predicted.sum())
    _write_json(run.out / "summary.json", summary)
    print(f"fairness-goodness finished after {scores.iterations_run} iterations "
          f"(converged={scores.converged})")
    return 0


def _spectral_config(args, seed_stage, run, k):
    return SpectralConfig(
        k=int(k),
        embedding_dim=getattr(args, "embedding_dim", None),
        kmeans_seed=run.seed_for(seed_stage),
        kmeans_restarts=int(_val(args, "restarts", 10)),
        eig_tolerance=float(_val(args, "eig_tolerance", 1e-8)),
    )


def _correlation_config(args, delta):
    return CorrelationConfig(
        delta=float(delta),
        pivot_order=_val(args, "pivot_order", "max_positive_degree"),
    )


def _maybe_densified(run, g):
    if getattr(run.args, "no_densify", False):
        return g
    scores = fairness_goodness(g, _fg_config(run.args))
    return densify(g, scores, "missing_only")


def _cmd_cluster(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    view = _maybe_densified(run, g)
    if a.method == "spectral":
        if a.k is None:
            raise UsageError("--method spectral requires --k")
        p = spectral_cluster(view, _spectral_config(a, "kmeans:original", run, a.k))
    else:
        p = correlation_cluster(view, _correlation_config(a, _val(a, "delta", 0.05)))
    _write_csv(run.out / "partition.csv", "node,cluster",
               ((int(n), int(c)) for n, c in zip(p.node_ids, p.labels)))
    summary = {
        "run_id": run.run_id,
        "method": a.method,
        "num_clusters": p.num_clusters,
        "cluster_sizes": [int(s) for s in p.sizes()],
        "disagreements": disagreements(g, p),
    }
    _write_json(run.out / "summary.json", summary)
    print(f"{a.method} clustering: {p.num_clusters} clusters, "
          f"disagreements={summary['disagreements']:.6g}")
    return 0


def _cmd_trust(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    if not Path(a.partition).exists():
        raise FileNotFoundError(f"partition file not found: {a.partition}")
    run.record_input(a.partition)
    p = read_partition_csv(a.partition)
    report = trust_report(g, p)
    _write_csv(run.out / "trust.csv", TRUST_HEADER, _trust_csv_rows(report))
    payload = report.to_dict()
    payload["run_id"] = run.run_id
    _write_json(run.out / "trust.json", payload)
    top = _val(a, "top", len(report.rows))
    print(TRUST_HEADER)
    for row in report.rows[:top]:
        print(f"{row.cluster_index},{row.num_nodes},{row.inside_positive_count},"
              f"{row.outside_negative_count},{row.inside_positive_weight_sum:.6g},"
              f"{row.outside_negative_abs_weight_sum:.6g},{row.trust:.6g}")
    print(f"total_trust={report.total_trust:.6g} over {len(report.rows)} clusters")
    return 0


def _pipeline_config(run):
    a = run.args
    fg = _fg_config(a)
    dens = None if getattr(a, "no_densify", False) else "missing_only"
    if a.method == "spectral":
        k0 = _val(a, "k_original", None)
        if k0 is None:
            raise UsageError("--method spectral requires --k-original")
        k1 = _val(a, "k_disrupted", k0)
        original = _spectral_config(a, "kmeans:original", run, k0)
        disrupted = _spectral_config(a, "kmeans:disrupted", run, k1)
    else:
        d0 = _val(a, "delta_original", 0.05)
        d1 = _val(a, "delta_disrupted", d0)
        original = _correlation_config(a, d0)
        disrupted = _correlation_config(a, d1)
    return PipelineConfig(method=a.method, original=original,
                          disrupted=disrupted, fg=fg, densify_mode=dens)


def _cmd_resiliency(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    report = run_pipeline(g, _pipeline_config(run))
    payload = report.to_dict()
    payload["run_id"] = run.run_id
    _write_json(run.out / "resiliency.json", payload)
    _write_csv(run.out / "trust_original.csv", TRUST_HEADER,
               _trust_csv_rows(report.original_report))
    _write_csv(run.out / "trust_disrupted.csv", TRUST_HEADER,
               _trust_csv_rows(report.disrupted_report))
    print(f"trust {report.trust_original:.6g} -> {report.trust_disrupted:.6g} "
          f"after removing cluster {report.removed_cluster_index} "
          f"({report.removed_cluster_size} nodes); "
          f"r_minus={report.r_minus:.6g} mae_baseline={report.mae_baseline:.6g}")
    return 0


def _cmd_eval_link_prediction(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    result = eval_link_prediction(g, float(a.train_frac), _fg_config(a))
    payload = result.to_dict()
    payload["run_id"] = run.run_id
    _write_json(run.out / "link_prediction.json", payload)
    print(f"train={result.train_edges} test={result.test_edges} "
          f"predicted={result.num_predicted} mae={result.mae:.6g}")
    return 0


def _cmd_eval_ablation(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    view = _maybe_densified(run, g) if not getattr(a, "no_densify", True) else g
    result = eval_positive_only_ablation(
        view, _spectral_config(a, "kmeans:original", run, a.k))
    payload = result.to_dict()
    payload["run_id"] = run.run_id
    _write_json(run.out / "ablation.json", payload)
    print(f"trust signed={result.trust_signed:.6g} "
          f"positive_only={result.trust_positive_only:.6g}")
    return 0


def _cmd_eval_yearwise(run):
    a = run.args
    g = _load_graph(run, a.graph, _val(a, "weight_divisor", 10.0))
    series = yearwise(g, _pipeline_config(run),
                      mode=_val(a, "yearwise_mode", "cumulative"))
    payload = series.to_dict()
    payload["run_id"] = run.run_id
    _write_json(run.out / "yearwise.json", payload)
    _write_csv(run.out / "yearwise.csv", "year,r_minus,mae",
               ((e.year, repr(e.r_minus), repr(e.mae)) for e in series.entries))
    for year, reason in series.skipped:
        print(f"warning: skipped {year}: {reason}", file=sys.stderr)
    print(f"yearwise: {len(series.entries)} entries, {len(series.skipped)} skipped")
    return 0


# -- argument wiring ------------------------------------------------------


def _add_common(p, graph_input=True):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON file with defaults for these options")
    p.add_argument("--weight-divisor", type=float, default=None)
    if graph_input:
        p.add_argument("--graph", required=True, help="edge-list CSV (optionally .gz)")


def _add_fg(p):
    p.add_argument("--fg-max-iterations", type=int, default=None)
    p.add_argument("--fg-tolerance", type=float, default=None)
    p.add_argument("--range-constant", type=float, default=None)


def _add_sample_seed(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", default=None,
                   help="temporal:<frac> or node:<frac>:<seed>")


def build_parser() -> _Parser:
    parser = _Parser(prog="trustnet",
                     description="Signed trust-network analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and normalize an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file with defaults for these options")
    p.add_argument("--weight-divisor", type=float, default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("predict", help="fairness-goodness scores and densified edges")
    _add_common(p)
    _add_fg(p)
    p.add_argument("--densify", choices=["missing_only", "all_pairs_capped", "none"],
                   default=None)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("cluster", help="community detection")
    _add_common(p)
    _add_fg(p)
    _add_sample_seed(p)
    p.add_argument("--method", choices=["spectral", "correlation"], required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--pivot-order", choices=["max_positive_degree", "node_id"],
                   default=None)
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--eig-tolerance", type=float, default=None)
    p.add_argument("--no-densify", action="store_true")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("trust", help="trustworthiness report for a partition")
    _add_common(p)
    p.add_argument("--partition", required=True, help="CSV `node,cluster`")
    p.add_argument("--top", type=int, default=None, help="rows to print")
    p.set_defaults(func=_cmd_trust)

    p = sub.add_parser("resiliency", help="full disruption pipeline")
    _add_common(p)
    _add_fg(p)
    _add_sample_seed(p)
    p.add_argument("--method", choices=["spectral", "correlation"], required=True)
    p.add_argument("--k-original", type=int, default=None)
    p.add_argument("--k-disrupted", type=int, default=None)
    p.add_argument("--delta-original", type=float, default=None)
    p.add_argument("--delta-disrupted", type=float, default=None)
    p.add_argument("--pivot-order", choices=["max_positive_degree", "node_id"],
                   default=None)
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--eig-tolerance", type=float, default=None)
    p.add_argument("--no-densify", action="store_true")
    p.set_defaults(func=_cmd_resiliency)

    p = sub.add_parser("eval", help="evaluation experiments")
    esub = p.add_subparsers(dest="eval_command", required=True)

    e = esub.add_parser("link-prediction", help="temporal-split prediction error")
    _add_common(e)
    _add_fg(e)
    _add_sample_seed(e)
    e.add_argument("--train-frac", type=float, required=True)
    e.set_defaults(func=_cmd_eval_link_prediction)

    e = esub.add_parser("ablation", help="positive-only vs signed clustering")
    _add_common(e)
    _add_fg(e)
    _add_sample_seed(e)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--embedding-dim", type=int, default=None)
    e.add_argument("--restarts", type=int, default=None)
    e.add_argument("--eig-tolerance", type=float, default=None)
    e.add_argument("--densify", dest="no_densify", action="store_false",
                   help="cluster the densified graph instead of the observed one")
    e.set_defaults(func=_cmd_eval_ablation, no_densify=True)

    e = esub.add_parser("yearwise", help="per-year resiliency series")
    _add_common(e)
    _add_fg(e)
    _add_sample_seed(e)
    e.add_argument("--method", choices=["spectral", "correlation"], required=True)
    e.add_argument("--k-original", type=int, default=None)
    e.add_argument("--k-disrupted", type=int, default=None)
    e.add_argument("--delta-original", type=float, default=None)
    e.add_argument("--delta-disrupted", type=float, default=None)
    e.add_argument("--pivot-order", choices=["max_positive_degree", "node_id"],
                   default=None)
    e.add_argument("--embedding-dim", type=int, default=None)
    e.add_argument("--restarts", type=int, default=None)
    e.add_argument("--eig-tolerance", type=float, default=None)
    e.add_argument("--no-densify", action="store_true")
    e.add_argument("--yearwise-mode", choices=["cumulative", "slice"], default=None)
    e.set_defaults(func=_cmd_eval_yearwise)

    return parser


def dispatch(argv) -> int:
    """Run one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _load_config_file(args)
        run = _Run(args, argv)
        status = args.func(run)
        run.finish()
        return status
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
