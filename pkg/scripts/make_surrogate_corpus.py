"""Write a synthetic corpus with the published release sizes and defect counts.

The releases are drawn from a small latent model, not from real projects;
they let the full pipeline run offline.  Results on them say nothing about
real defect data.

    python scripts/make_surrogate_corpus.py --out data/surrogate --seed 2016
"""

from __future__ import annotations

import argparse

from defect_tuning.synthetic import write_corpus


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=2016)
    args = p.parse_args()
    manifests = write_corpus(args.out, seed=args.seed)
    print(f"{len(manifests)} projects written to {args.out}")


if __name__ == "__main__":
    main()
