"""Command-line entry point: `gca-sim <command> [options]`."""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np

from gcasim import __version__
from gcasim.analysis import (
    ExternalVariable,
    edge_length_variable,
    internal_consistency,
    iterate_correlations,
    load_edge_variable,
    load_external_variable,
)
from gcasim.artifacts import ArtifactMeta, write_csv, write_json
from gcasim.baselines import degree_jsd_matrix, netsimile_matrix
from gcasim.clustering import DEFAULT_TEMPERATURE, select_k
from gcasim.engine import evolve, iteration_quantiles, load_rule
from gcasim.errors import (
    EXIT_OK,
    ConfigurationError,
    DataError,
    GcaError,
    UsageError,
    ValidationError,
)
from gcasim.network import NetworkFormat, SpatialNetwork, load_network, save_network
from gcasim.network.synth import FAMILIES, grid, synthetic_corpus, synthetic_groups
from gcasim.settings import RunConfig, load_settings
from gcasim.similarity import DistanceMatrix, distance_matrix
from gcasim.telemetry import (
    configure_console_logging,
    get_tracer,
    init_telemetry,
    record_metric,
    shutdown_telemetry,
)
from gcasim.training import GroupSet, Trainer, TrainConfig

logger = logging.getLogger(__name__)
tracer = get_tracer("gcasim.cli")

NETWORK_SUFFIXES = (".json", ".graphml", ".xml")
GLOBAL_OPTIONS = {"command", "handler", "threads", "output_dir", "log_level"}


class JsonErrorParser(argparse.ArgumentParser):
    """Reports usage mistakes as a one-line JSON error object on stderr (exit 2)."""

    def error(self, message: str) -> NoReturn:
        failure = UsageError(f"{self.prog}: {message}")
        self.exit(failure.exit_code, json.dumps(failure.to_dict(), sort_keys=True) + "\n")


class RunContext:
    """Resolved output directory, thread cap and the metadata stamped on every artifact."""

    def __init__(self, config: RunConfig, threads: int | None) -> None:
        self.config = config
        self.threads = threads
        self.output_dir = Path(config.output_dir)
        self.meta = ArtifactMeta(config_hash=config.config_hash(), seeds=config.seeds)

    def path(self, *parts: str) -> Path:
        return self.output_dir.joinpath(*parts)


def slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "network"


def _network_paths(path: Path) -> list[Path]:
    if not path.is_dir() or (path / "nodes.csv").exists():
        return [path]
    found = [
        child
        for child in sorted(path.iterdir())
        if child.suffix.lower() in NETWORK_SUFFIXES or (child / "nodes.csv").exists()
    ]
    if not found:
        raise ValidationError(f"no networks found in directory {path}")
    return found


def load_corpus(paths: Sequence[str], fmt: str | None = None) -> list[SpatialNetwork]:
    """Networks from files or directories; a plain directory contributes every network in it."""
    corpus = [
        load_network(candidate, fmt)
        for path in paths
        for candidate in _network_paths(Path(path))
    ]
    seen: set[str] = set()
    for net in corpus:
        if net.name in seen:
            raise ValidationError(f"duplicate network name {net.name!r} in corpus")
        seen.add(net.name)
    return corpus


# ---------------------------------------------------------------------- commands


def cmd_ingest(args: argparse.Namespace, ctx: RunContext) -> None:
    if args.name and len(args.inputs) > 1:
        raise ConfigurationError("--name needs exactly one input")
    corpus = [load_network(path, args.format, args.name) for path in args.inputs]
    manifest = []
    for net in corpus:
        target = save_network(net, ctx.path("networks", f"{slug(net.name)}.json"), ctx.meta)
        manifest.append(
            {"name": net.name, "nodes": net.n_nodes, "edges": net.n_edges, "path": target.name}
        )
    write_json(ctx.path("ingest.json"), {"networks": manifest}, ctx.meta)


def cmd_features(args: argparse.Namespace, ctx: RunContext) -> None:
    net = load_network(args.input, args.format)
    rule = load_rule(args.rule)
    stem = slug(net.name)
    features = net.features
    write_csv(
        ctx.path(f"{stem}.features.csv"),
        ["u", "v", "length_m", "d", "theta"],
        (
            [int(net.ids[u]), int(net.ids[v]), length, d, theta]
            for u, v, length, d, theta in zip(
                net.src, net.dst, features.length_m, features.d, features.theta, strict=True
            )
        ),
        ctx.meta,
    )
    trace = evolve(net, rule, args.T)
    write_csv(ctx.path(f"{stem}.trace.csv"), trace.header(), trace.to_rows(net), ctx.meta)
    quantiles = iteration_quantiles(trace, args.quantiles)
    write_csv(
        ctx.path(f"{stem}.quantiles.csv"),
        ["t", *(f"q{q:g}" for q in args.quantiles)],
        ([t, *row.tolist()] for t, row in enumerate(quantiles)),
        ctx.meta,
    )


def cmd_dist(args: argparse.Namespace, ctx: RunContext) -> None:
    corpus = load_corpus(args.inputs, args.format)
    if args.method == "gca":
        matrix = distance_matrix(
            corpus,
            load_rule(args.rule),
            args.T,
            args.bins,
            include_t0=args.include_t0,
            threads=ctx.threads,
        )
    elif args.method == "degreejsd":
        matrix = degree_jsd_matrix(corpus, threads=ctx.threads)
    else:
        matrix = netsimile_matrix(corpus, threads=ctx.threads)
    matrix.to_csv(ctx.path("dist.csv"), ctx.meta)
    matrix.to_json(ctx.path("dist.json"), ctx.meta)


def _read_matrix(path: str) -> DistanceMatrix:
    if Path(path).suffix.lower() == ".json":
        return DistanceMatrix.read_json(path)
    return DistanceMatrix.read_csv(path)


def cmd_cluster(args: argparse.Namespace, ctx: RunContext) -> None:
    matrix = _read_matrix(args.matrix)
    result = select_k(matrix, args.k_min, args.k_max, args.temperature)
    write_json(
        ctx.path("cluster.json"),
        {"names": matrix.names, "method": matrix.method, **result.to_dict()},
        ctx.meta,
    )
    write_csv(
        ctx.path("labels.csv"),
        ["name", "label"],
        zip(matrix.names, result.labels.tolist(), strict=True),
        ctx.meta,
    )
    print(f"k={result.k} silhouette={result.silhouette:.4f} db={result.db:.4f}")


def _train_config(args: argparse.Namespace) -> TrainConfig:
    base: dict[str, Any] = {}
    if args.config:
        base = TrainConfig.from_file(args.config).model_dump()
    overrides = {
        "explore_budget": args.budget,
        "epochs_per_group": args.epochs_per_group,
        "learning_rate": args.learning_rate,
        "seed": args.seed,
        "wiring_seed": args.wiring_seed,
    }
    base.update({key: value for key, value in overrides.items() if value is not None})
    return TrainConfig.build(**base)


def cmd_train(args: argparse.Namespace, ctx: RunContext) -> None:
    cfg = _train_config(args)
    if args.train or args.validation:
        if not (args.train and args.validation):
            raise ConfigurationError("--train and --validation must be given together")
        groups = GroupSet(
            train=[load_corpus([path], args.format) for path in args.train],
            validation=[load_corpus([path], args.format) for path in args.validation],
        )
    else:
        groups = synthetic_groups(
            args.train_groups,
            args.validation_groups,
            args.per_family,
            (args.min_nodes, args.max_nodes),
            cfg.seed,
        )
    trainer = Trainer(cfg, ctx.path("train"), threads=ctx.threads, meta=ctx.meta)
    run = trainer.run(groups)
    baseline = run.laplacian_silhouette
    laplacian = "failed" if baseline is None else f"{baseline:.4f}"
    print(
        f"promoted={run.explore.promoted} best_silhouette={run.fine_tune.best_silhouette:.4f} "
        f"laplacian_silhouette={laplacian}"
    )


def cmd_consistency(args: argparse.Namespace, ctx: RunContext) -> None:
    rule = load_rule(args.rule)
    reports = []
    for net in load_corpus(args.inputs, args.format):
        report = internal_consistency(
            net,
            rule,
            args.window_m,
            args.tile_m,
            args.min_nodes,
            T=args.T,
            bins=args.bins,
            threads=ctx.threads,
        )
        report.matrix.to_csv(ctx.path(f"{slug(net.name)}.tiles.csv"), ctx.meta)
        reports.append(report.to_dict())
        print(f"{net.name}: K={report.K} IC={report.ic:.4f}")
    write_json(ctx.path("consistency.json"), {"networks": reports}, ctx.meta)


def cmd_correlate(args: argparse.Namespace, ctx: RunContext) -> None:
    net = load_network(args.input, args.format)
    variables: list[ExternalVariable] = [load_external_variable(path) for path in args.var]
    variables += [load_edge_variable(path) for path in args.edge_var]
    if args.edge_length or not variables:
        variables.append(edge_length_variable(net))
    table = iterate_correlations(
        net, load_rule(args.rule), variables, args.T, args.min_coverage, threads=ctx.threads
    )
    table.to_csv(ctx.path("correlations.csv"), ctx.meta)
    if table.skipped:
        print(f"skipped: {', '.join(table.skipped)}", file=sys.stderr)


def cmd_bench(args: argparse.Namespace, ctx: RunContext) -> None:
    rule = load_rule(args.rule)
    rows: list[list[float]] = []
    for size in args.sizes:
        cols = max(1, size // args.rows)
        net = grid(args.rows, cols, name=f"grid-{args.rows}x{cols}")
        evolve(net, rule, args.T)  # warm-up
        timings = []
        for _ in range(args.repeats):
            started = time.perf_counter()
            evolve(net, rule, args.T)
            timings.append(time.perf_counter() - started)
        rows.append([net.n_nodes, net.n_edges, float(np.median(timings)), min(timings)])
    base = rows[0][2]
    write_csv(
        ctx.path("bench.csv"),
        ["nodes", "edges", "median_s", "min_s", "ratio"],
        ([*row, row[2] / base if base > 0 else float("nan")] for row in rows),
        ctx.meta,
    )
    for row in rows:
        print(f"nodes={row[0]} median={row[2]:.4f}s")


def cmd_synth(args: argparse.Namespace, ctx: RunContext) -> None:
    corpus = synthetic_corpus(
        args.per_family, (args.min_nodes, args.max_nodes), args.seed, args.families
    )
    for net in corpus.networks:
        save_network(net, ctx.path("synth", f"{slug(net.name)}.json"), ctx.meta)
    write_csv(
        ctx.path("labels.csv"),
        ["name", "family", "label"],
        (
            [net.name, corpus.families[label], label]
            for net, label in zip(corpus.networks, corpus.labels, strict=True)
        ),
        ctx.meta,
    )


# ---------------------------------------------------------------------- parser


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=[fmt.value for fmt in NetworkFormat],
        default=None,
        help="Input format (default: inferred from the path).",
    )


def _add_rule(parser: argparse.ArgumentParser, iterations: int = 5) -> None:
    parser.add_argument(
        "--rule", default="laplacian", help="`laplacian` or a gca-rule/1 JSON file."
    )
    parser.add_argument("-T", type=int, default=iterations, help="Number of iterations.")


def _add_bins(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bins", type=int, default=load_settings().default_bins)


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    parser = JsonErrorParser(
        prog="gca-sim", description="Graph-cellular-automaton similarity for spatial networks"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=settings.threads,
        help="Worker thread cap (default: available cores).",
    )
    parser.add_argument(
        "--output-dir",
        default=str(settings.output_dir),
        help="Artifact directory (env GCASIM_OUTPUT_DIR).",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="Load, clean and serialise networks.")
    ingest.add_argument("inputs", nargs="+")
    ingest.add_argument("--name", default=None, help="Network name (single input only).")
    _add_format(ingest)
    ingest.set_defaults(handler=cmd_ingest)

    features = sub.add_parser("features", help="Export half-edge features and state quantiles.")
    features.add_argument("input")
    _add_format(features)
    _add_rule(features, settings.default_iterations)
    features.add_argument(
        "--quantiles", type=float, nargs="+", default=[0.05, 0.25, 0.5, 0.75, 0.95]
    )
    features.set_defaults(handler=cmd_features)

    dist = sub.add_parser("dist", help="Distance matrix over a corpus.")
    dist.add_argument("inputs", nargs="+")
    _add_format(dist)
    _add_rule(dist, settings.default_iterations)
    _add_bins(dist)
    dist.add_argument("--method", choices=["gca", "degreejsd", "netsimile"], default="gca")
    dist.add_argument("--include-t0", action="store_true")
    dist.set_defaults(handler=cmd_dist)

    cluster = sub.add_parser("cluster", help="Cluster a distance matrix.")
    cluster.add_argument("matrix", help="gca-dist/1 JSON or square CSV.")
    cluster.add_argument("--k-min", type=int, default=2)
    cluster.add_argument("--k-max", type=int, default=None)
    cluster.add_argument("--temperature", type=float, default=DEFAULT_TEMPERATURE)
    cluster.set_defaults(handler=cmd_cluster)

    train = sub.add_parser("train", help="Explore and fine-tune a gate-triple rule.")
    train.add_argument("--config", default=None, help="TrainConfig JSON.")
    train.add_argument("--train", nargs="+", default=None, help="One directory per group.")
    train.add_argument("--validation", nargs="+", default=None, help="One directory per group.")
    _add_format(train)
    train.add_argument("--budget", type=int, default=None)
    train.add_argument("--epochs-per-group", type=int, default=None)
    train.add_argument("--learning-rate", type=float, default=None)
    train.add_argument("--seed", type=int, default=None)
    train.add_argument("--wiring-seed", type=int, default=None)
    train.add_argument("--train-groups", type=int, default=4)
    train.add_argument("--validation-groups", type=int, default=2)
    train.add_argument("--per-family", type=int, default=4)
    train.add_argument("--min-nodes", type=int, default=300)
    train.add_argument("--max-nodes", type=int, default=800)
    train.set_defaults(handler=cmd_train)

    consistency = sub.add_parser("consistency", help="Internal consistency index per network.")
    consistency.add_argument("inputs", nargs="+")
    _add_format(consistency)
    _add_rule(consistency, settings.default_iterations)
    _add_bins(consistency)
    consistency.add_argument("--window-m", type=float, default=20_000.0)
    consistency.add_argument("--tile-m", type=float, default=1_000.0)
    consistency.add_argument("--min-nodes", type=int, default=10)
    consistency.set_defaults(handler=cmd_consistency)

    correlate = sub.add_parser("correlate", help="Spearman rho of states vs node variables.")
    correlate.add_argument("input")
    _add_format(correlate)
    _add_rule(correlate, 10)
    correlate.add_argument("--var", action="append", default=[], help="`id,value` CSV.")
    correlate.add_argument("--edge-var", action="append", default=[], help="`u,v,value` CSV.")
    correlate.add_argument("--edge-length", action="store_true")
    correlate.add_argument("--min-coverage", type=float, default=0.5)
    correlate.set_defaults(handler=cmd_correlate)

    bench = sub.add_parser("bench", help="Time evolve on synthetic grids.")
    bench.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000])
    bench.add_argument("--rows", type=int, default=100)
    bench.add_argument("--repeats", type=int, default=5)
    _add_rule(bench, settings.default_iterations)
    bench.set_defaults(handler=cmd_bench)

    synth = sub.add_parser("synth", help="Generate the seeded synthetic corpus.")
    synth.add_argument("--per-family", type=int, default=8)
    synth.add_argument("--min-nodes", type=int, default=300)
    synth.add_argument("--max-nodes", type=int, default=800)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--families", nargs="+", choices=list(FAMILIES), default=list(FAMILIES))
    synth.set_defaults(handler=cmd_synth)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    parameters = {k: v for k, v in vars(args).items() if k not in GLOBAL_OPTIONS}
    inputs = [
        str(value)
        for key in ("inputs", "input", "matrix")
        for value in _listify(parameters.pop(key, None))
    ]
    rule = parameters.pop("rule", None)
    seeds: dict[str, int] = {}
    if args.command == "train":
        cfg = _train_config(args)
        seeds = {"seed": cfg.seed, "wiring_seed": cfg.wiring_seed}
    elif parameters.get("seed") is not None:
        seeds = {"seed": int(parameters["seed"])}
    return RunConfig(
        command=args.command,
        parameters=parameters,
        inputs=inputs,
        rule=rule,
        seeds=seeds,
        output_dir=args.output_dir,
    )


def _listify(value: Any) -> list[Any]:
    if value is None:
        return []
    return list(value) if isinstance(value, list) else [value]


def _as_data_error(exc: OSError) -> DataError:
    return DataError(exc.strerror or str(exc), path=exc.filename)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_console_logging(args.log_level)
    init_telemetry()
    threads = args.threads if args.threads is not None else os.cpu_count()
    try:
        config = _run_config(args)
        ctx = RunContext(config, threads)
        with tracer.start_as_current_span(f"gcasim.cli.{args.command}") as span:
            span.set_attribute("config_hash", ctx.meta.config_hash)
            args.handler(args, ctx)
        write_json(ctx.path(f"{args.command}.config.json"), config.model_dump(), ctx.meta)
        record_metric("gcasim_cli_commands", 1, {"command": args.command})
    except (GcaError, OSError) as raised:
        exc = raised if isinstance(raised, GcaError) else _as_data_error(raised)
        logger.error("command_failed", extra={"command": args.command, "error": str(exc)})
        print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        record_metric("gcasim_cli_failures", 1, {"command": args.command, "code": exc.exit_code})
        return exc.exit_code
    finally:
        shutdown_telemetry()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
