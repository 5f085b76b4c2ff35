"""The sweep protocol on the synthetic stand-in corpus.

These exercise the same machinery as the data-dependent acceptance
criteria, on releases with the published sizes and defect counts but
synthetic metrics.  Passing here says the pipeline holds its invariants;
it is not evidence about real defect data.
"""

from __future__ import annotations

import pytest

from defect_tuning.dataset import check_counts, load_triples
from defect_tuning.harness import TUNED, ExperimentPlan, median_deltas, run_plan
from defect_tuning.metrics import better

TRIPLES = ("antV0", "ivyV0", "synapseV0")


@pytest.fixture(scope="module")
def surrogate_sweep(surrogate_corpus):
    triples = load_triples(surrogate_corpus)
    plan = ExperimentPlan(triples=TRIPLES, learners=("where", "cart", "rf", "lr"), goals=("prec", "f"),
                          repeats=1, seed=20160607)
    return run_plan(plan, triples)


def test_surrogate_counts_match_published(surrogate_corpus):
    rows = check_counts(load_triples(surrogate_corpus))
    assert len({r[0] for r in rows}) == 17
    assert all(obs == exp for _, _, obs, exp in rows)


def test_surrogate_evaluation_budget(surrogate_sweep):
    tuned = [r for r in surrogate_sweep if r.mode == TUNED]
    assert len(tuned) == len(TRIPLES) * 3 * 2
    for r in tuned:
        assert r.evaluations == r.np * (r.generations + 1)
        assert r.evaluations >= r.np * 6


def test_surrogate_never_worse(surrogate_sweep):
    for r in surrogate_sweep:
        if r.mode == TUNED:
            assert not better(r.goal, r.default_tune_score, r.tune_score)


def test_surrogate_direction_summary_is_finite(surrogate_sweep):
    deltas = median_deltas(surrogate_sweep)
    assert set(deltas) == {(l, g) for l in ("where", "cart", "rf") for g in ("prec", "f")}
    assert all(-1.0 <= d <= 1.0 for d in deltas.values())
