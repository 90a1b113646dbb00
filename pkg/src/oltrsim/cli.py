"""Command-line entry point.

Subcommands::

    oltrsim run <config.json>          execute an experiment, write outputs
    oltrsim plot <out-dir>             rebuild curve.svg from trace.csv
    oltrsim compare <dir-a> <dir-b>    Welch test between two result sets
    oltrsim synth <spec.json> <dir>    write synthetic data in LETOR format

Set ``OLTR_WORKERS`` to override the number of worker processes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .datasets import make_synthetic, write_letor
from .evaluation import welch_t_test
from .experiments import (
    ExperimentConfig,
    emit_outputs,
    read_trace_csv,
    run_experiment,
    write_curve_svg,
)


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    config.validate()
    results, summary = run_experiment(config, workers=args.workers)
    paths = emit_outputs(results, summary, config.output_dir)
    print(
        f"{config.algorithm} ({config.click_model}"
        + (f", {config.comparator}" if config.algorithm == "dbgd" else "")
        + f"): final NDCG@10 = {summary['final_ndcg_mean']:.4f}"
        f" +/- {summary['final_ndcg_std']:.4f} over {summary['repeats']} runs"
    )
    if "baseline" in summary:
        base = summary["baseline"]
        print(f"vs baseline {base['dir']}: t = {base['t_statistic']:.3f}, p = {base['p_value']:.2e}")
    print(f"outputs: {paths['trace']}, {paths['summary']}, {paths['curve']}")
    return 0


def _cmd_plot(args) -> int:
    trace_path = os.path.join(args.out_dir, "trace.csv")
    impressions, curves, _ = read_trace_csv(trace_path)
    curve_path = os.path.join(args.out_dir, "curve.svg")
    write_curve_svg(impressions, curves, curve_path)
    print(f"wrote {curve_path}")
    return 0


def _load_finals(out_dir: str) -> np.ndarray:
    with open(os.path.join(out_dir, "summary.json"), "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    return np.asarray(summary["per_run_final"], dtype=np.float64)


def _cmd_compare(args) -> int:
    finals_a = _load_finals(args.dir_a)
    finals_b = _load_finals(args.dir_b)
    t, p = welch_t_test(finals_a, finals_b)
    print(f"a: {args.dir_a}: mean = {finals_a.mean():.4f} (n = {finals_a.size})")
    print(f"b: {args.dir_b}: mean = {finals_b.mean():.4f} (n = {finals_b.size})")
    print(f"welch two-sided: t = {t:.4f}, p = {p:.4e}")
    return 0


def _cmd_synth(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    data = make_synthetic(
        num_queries=int(spec["num_queries"]),
        docs_per_query=int(spec["docs_per_query"]),
        feature_dim=int(spec["feature_dim"]),
        seed=int(spec["seed"]),
    )
    os.makedirs(args.out_dir, exist_ok=True)
    train_path = os.path.join(args.out_dir, "train.txt")
    test_path = os.path.join(args.out_dir, "test.txt")
    write_letor(data.train, train_path)
    write_letor(data.test, test_path)
    print(f"wrote {train_path} ({len(data.train)} queries), {test_path} ({len(data.test)} queries)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oltrsim", description="Online learning-to-rank simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to the experiment config (JSON)")
    p_run.add_argument("--workers", type=int, default=None, help="worker processes (default: OLTR_WORKERS or CPU count)")
    p_run.set_defaults(func=_cmd_run)

    p_plot = sub.add_parser("plot", help="rebuild curve.svg from a result directory")
    p_plot.add_argument("out_dir", help="directory containing trace.csv")
    p_plot.set_defaults(func=_cmd_plot)

    p_cmp = sub.add_parser("compare", help="Welch t-test between two result directories")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.set_defaults(func=_cmd_compare)

    p_synth = sub.add_parser("synth", help="write a synthetic dataset in LETOR format")
    p_synth.add_argument("spec", help="JSON file with num_queries, docs_per_query, feature_dim, seed")
    p_synth.add_argument("out_dir", help="directory to write train.txt and test.txt into")
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a readable error, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
