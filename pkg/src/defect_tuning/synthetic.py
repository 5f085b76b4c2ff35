"""Synthetic PROMISE-format corpora for exercising the pipeline offline.

Rows are drawn from a small latent model (size, coupling, cohesion) so that
the metrics carry some signal about defects, and exactly ``defective`` rows
of each release get a positive defect count.  The numbers mean nothing
beyond that; they only give the learners something learnable.
"""

from __future__ import annotations

import zlib
from pathlib import Path

import numpy as np

from .dataset import ATTRIBUTES, PUBLISHED_RELEASES, Instance, Release, write_release


def _stable_seed(*parts) -> int:
    return zlib.crc32("/".join(map(str, parts)).encode())


def synthetic_release(project: str, version_index: int, defective: int, total: int,
                      seed: int = 0, drift: float = 0.0) -> Release:
    if not 0 <= defective <= total or total < 1:
        raise ValueError("need 0 <= defective <= total and total >= 1")
    rng = np.random.default_rng([seed, _stable_seed(project, version_index)])
    size = rng.normal(0.0, 1.0, total)
    coupling = 0.6 * size + rng.normal(0.0, 0.8, total)
    cohesion = rng.normal(0.0, 1.0, total)
    noise = lambda scale=0.3: rng.normal(0.0, scale, total)
    pos = lambda v: np.maximum(v, 0.0)
    wmc = np.round(pos(np.exp(1.8 + 0.7 * size + noise())))
    loc = np.round(pos(np.exp(4.5 + 0.9 * size + noise())))
    m = {
        "wmc": wmc,
        "loc": loc,
        "npm": np.round(pos(wmc * (0.6 + 0.1 * noise()))),
        "rfc": np.round(pos(wmc * 2.5 + np.exp(1.5 + 0.8 * coupling) + noise(2))),
        "cbo": np.round(pos(np.exp(1.6 + 0.7 * coupling + noise()))),
        "ce": np.round(pos(np.exp(1.2 + 0.7 * coupling + noise()))),
        "ca": np.round(pos(np.exp(0.8 + 0.5 * coupling + noise(0.8)))),
        "dit": np.round(np.clip(1 + np.abs(rng.normal(0.8, 0.9, total)), 1, 8)),
        "noc": np.round(pos(rng.exponential(0.4, total) - 0.2)),
        "lcom": np.round(pos(wmc ** 2 * (0.3 + 0.2 * np.tanh(-cohesion)) + noise(3))),
        "lcom3": np.clip(0.6 - 0.2 * cohesion + noise(0.2), 0.0, 2.0),
        "cam": np.clip(0.5 + 0.15 * cohesion - 0.05 * size + noise(0.1), 0.0, 1.0),
        "dam": np.clip(0.6 + noise(0.35), 0.0, 1.0),
        "moa": np.round(pos(rng.poisson(0.6, total) + 0.3 * size)),
        "mfa": np.clip(rng.beta(0.6, 1.2, total), 0.0, 1.0),
        "cbm": np.round(pos(rng.poisson(0.5, total) + 0.5 * coupling)),
        "ic": np.round(pos(rng.poisson(0.3, total) + 0.2 * coupling)),
        "amc": pos(loc / np.maximum(wmc, 1) * (0.8 + 0.1 * noise())),
        "max_cc": np.round(pos(np.exp(1.0 + 0.6 * size + noise(0.5)))),
    }
    m["avg_cc"] = np.minimum(m["max_cc"], pos(1.0 + 0.4 * size + noise(0.3)))
    risk = 0.9 * size + 0.5 * coupling - 0.3 * cohesion + drift + rng.normal(0.0, 1.0, total)
    counts = np.zeros(total, dtype=int)
    worst = np.argsort(-risk, kind="stable")[:defective]
    counts[worst] = rng.geometric(0.55, defective) + (risk[worst] > 2.0)
    version = f"1.{version_index}"
    instances = tuple(
        Instance(tuple(float(m[a][i]) for a in ATTRIBUTES), int(counts[i]),
                 (project, version, f"{project}.C{i}"))
        for i in range(total))
    return Release(project, version_index, instances)


def write_corpus(out_dir: str | Path, releases: dict[str, list[tuple[int, int]]] | None = None,
                 seed: int = 0) -> list[Path]:
    """Write one CSV per release and one ``<project>.manifest`` per project."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifests = []
    for project, sizes in (releases or PUBLISHED_RELEASES).items():
        names = []
        for k, (defective, total) in enumerate(sizes):
            rel = synthetic_release(project, k, defective, total, seed, drift=0.1 * k)
            name = f"{project}-1.{k}.csv"
            write_release(rel, out_dir / name)
            names.append(name)
        path = out_dir / f"{project}.manifest"
        path.write_text("\n".join(names) + "\n", encoding="utf-8")
        manifests.append(path)
    return manifests
