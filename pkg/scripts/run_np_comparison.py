"""Compare DE population sizes: tuned runs at np=10 against larger populations.

Writes np_deltas.csv (per-triple score change versus np=10) and np_ks.csv
(KS comparison of those deltas between learners) next to the usual reports.

    python scripts/run_np_comparison.py --manifest data/promise --out runs/np --np 10,50,60,90
"""

from __future__ import annotations

import sys

from defect_tuning.harness.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--np" not in args:
        args += ["--np", "10,50,60,90"]
    if "--learners" not in args:
        args += ["--learners", "where,cart,rf"]
    sys.exit(main(["run", *args]))
