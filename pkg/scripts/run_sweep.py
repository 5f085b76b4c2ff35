"""Full tuned-vs-untuned sweep with the default DE settings, then a summary.

Runs WHERE, CART, RF (tuned and untuned) and LR (untuned) on every triple
for precision and F, np=10, over several seeds, writes the reports, and
prints the checks behind the evaluation-budget, never-worse and
tuning-direction criteria.

    python scripts/run_sweep.py --manifest data/promise --out runs/sweep --repeats 5
"""

from __future__ import annotations

import argparse
import os
import time
from pathlib import Path

from defect_tuning.dataset import load_triples
from defect_tuning.harness import TUNED, ExperimentPlan, emit_reports, median_deltas, run_plan, write_records
from defect_tuning.metrics import better


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=20160607)
    p.add_argument("--np", type=int, default=10)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = p.parse_args()

    plan = ExperimentPlan(learners=("where", "cart", "rf", "lr"), goals=("prec", "f"),
                          repeats=args.repeats, seed=args.seed, nps=(args.np,))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    records = run_plan(plan, load_triples(args.manifest), jobs=args.jobs)
    write_records(records, out / "records.jsonl")
    emit_reports(records, out)
    print(f"{len(records)} records in {time.perf_counter() - t0:.0f}s -> {out}")

    tuned = [r for r in records if r.mode == TUNED]
    evals = [r.evaluations for r in tuned]
    print(f"evaluations: min {min(evals)} max {max(evals)}; "
          f"identity holds: {all(r.evaluations == r.np * (r.generations + 1) for r in tuned)}")
    worse = [r for r in tuned if better(r.goal, r.default_tune_score, r.tune_score)]
    print(f"tuned worse than default on the tuning release: {len(worse)} of {len(tuned)}")
    for (learner, goal), d in sorted(median_deltas(records).items()):
        print(f"median tuned - untuned  {learner:5s} {goal:4s} {d:+.3f}")


if __name__ == "__main__":
    main()
