#!/usr/bin/env python3
"""Run the full desk-scale learner comparison on the bundled benchmark.

Executes DBGD (probabilistic interleaving and oracle comparator) and PDGD
under the perfect and almost-random behavior models, prints a summary
table with Welch significance tests against DBGD-perfect, and writes the
usual trace/summary/curve outputs per arm.

Usage:
    python scripts/compare_learners.py --out results/comparison
    python scripts/compare_learners.py --repeats 5 --impressions 5000   # quick look
"""

import argparse
import os
import sys
import time

import numpy as np

from oltrsim.evaluation import welch_t_test
from oltrsim.experiments import BUNDLED_SYNTHETIC, ExperimentConfig, emit_outputs, run_experiment

ARMS = [
    # name, algorithm, comparator, click model, base seed
    ("dbgd_perfect", "dbgd", "probabilistic", "perfect", 22),
    ("dbgd_oracle", "dbgd", "oracle", "perfect", 33),
    ("dbgd_ar_cascading", "dbgd", "probabilistic", "almost_random_cascading", 66),
    ("pdgd_perfect", "pdgd", "probabilistic", "perfect", 11),
    ("pdgd_ar_cascading", "pdgd", "probabilistic", "almost_random_cascading", 44),
    ("pdgd_ar_noncascading", "pdgd", "probabilistic", "almost_random_noncascading", 55),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/comparison", help="output root directory")
    parser.add_argument("--impressions", type=int, default=20000)
    parser.add_argument("--repeats", type=int, default=25)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    finals = {}
    for name, algorithm, comparator, model, seed in ARMS:
        config = ExperimentConfig(
            algorithm=algorithm,
            comparator=comparator,
            click_model=model,
            synthetic=BUNDLED_SYNTHETIC,
            impressions=args.impressions,
            repeats=args.repeats,
            base_seed=seed,
            output_dir=os.path.join(args.out, name),
        )
        start = time.time()
        results, summary = run_experiment(config, workers=args.workers)
        emit_outputs(results, summary, config.output_dir)
        finals[name] = np.asarray(summary["per_run_final"])
        print(
            f"{name:22s} ndcg@10 = {summary['final_ndcg_mean']:.4f} "
            f"+/- {summary['final_ndcg_std']:.4f}  ({time.time() - start:.0f}s)"
        )

    reference = finals["dbgd_perfect"]
    print(f"\n{'arm':22s} {'mean':>8s} {'std':>8s} {'vs dbgd_perfect':>18s}")
    for name, values in finals.items():
        if name == "dbgd_perfect":
            verdict = "-"
        else:
            t, p = welch_t_test(values, reference)
            verdict = f"t={t:+.2f}, p={p:.1e}"
        print(f"{name:22s} {values.mean():8.4f} {values.std(ddof=1):8.4f} {verdict:>18s}")
    print(f"\noutputs under {args.out}/<arm>/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
