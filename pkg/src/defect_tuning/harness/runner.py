"""Tuned and untuned runs over release triples.

Seeds: every cell of a plan gets its own 64-bit seed derived from the plan
seed and the cell's identity (triple, learner, goal, np, repeat) through
``numpy.random.SeedSequence``, so records do not depend on execution order
or on how many worker processes run them.
"""

from __future__ import annotations

import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from ..dataset import ExperimentTriple, merge_releases
from ..learners import Config, Learner, default_config, param_space, train
from ..metrics import Goal, all_scores, confusion
from ..tuner import DEConfig, de_tune, learner_seed, score

TUNED, UNTUNED = "tuned", "untuned"


def cell_seed(master: int, *parts: Any) -> int:
    key = zlib.crc32("|".join(str(p) for p in parts).encode())
    return int(np.random.SeedSequence([int(master), key]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentPlan:
    triples: tuple[str, ...] | None = None
    learners: tuple[Learner, ...] = (Learner.WHERE, Learner.CART, Learner.RANDOM_FOREST, Learner.LOGISTIC_REGRESSION)
    goals: tuple[Goal, ...] = (Goal.PREC, Goal.F)
    repeats: int = 1
    seed: int = 0
    nps: tuple[int, ...] = (10,)
    life: int = 5
    f: float = 0.75
    cr: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "learners", tuple(Learner.parse(l) for l in self.learners))
        object.__setattr__(self, "goals", tuple(Goal.parse(g) for g in self.goals))
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not self.goals or not self.learners or not self.nps:
            raise ValueError("plan needs at least one learner, goal and np")

    def de(self, np_: int, goal: Goal, seed: int) -> DEConfig:
        return DEConfig(np=np_, f=self.f, cr=self.cr, life=self.life, goal=goal, seed=seed)


@dataclass
class RunRecord:
    triple: str
    learner: str
    goal: str | None
    mode: str
    seed: int
    repeat: int = 0
    np: int | None = None
    scores: dict[str, float] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)
    features: list[str] = field(default_factory=list)
    evaluations: int = 0
    generations: int = 0
    tune_score: float | None = None
    default_tune_score: float | None = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunRecord:
        return cls(**d)

    def without_timing(self) -> dict:
        d = self.to_dict()
        d.pop("seconds")
        return d


def _evaluate(config: Config, train_data, test, seed: int):
    model = train(config, train_data, seed)
    scores = all_scores(confusion(test.labels, model.predict_many(test.X)))
    return model, scores


def run_tuned(triple: ExperimentTriple, learner: Learner | str, goal: Goal | str, de: DEConfig,
              seed: int, repeat: int = 0) -> RunRecord:
    """Tune on (train, tune), retrain the best config on train, score once on test."""
    learner, goal = Learner.parse(learner), Goal.parse(goal)
    de = replace(de, goal=goal, seed=seed)
    t0 = time.perf_counter()
    result = de_tune(learner, triple.train, triple.tune, de)
    lseed = learner_seed(seed)
    model, scores = _evaluate(result.best.config, triple.train, triple.test, lseed)
    seconds = time.perf_counter() - t0
    default_score = score(default_config(learner), triple.train, triple.tune, goal, lseed)
    return RunRecord(triple.name, learner.value, goal.value, TUNED, seed, repeat, de.np, scores,
                     dict(result.best.config.values), sorted(model.features_used()),
                     result.evaluations, result.generations, result.best.score, default_score, seconds)


def run_untuned(triple: ExperimentTriple, learner: Learner | str, seed: int, repeat: int = 0) -> RunRecord:
    """Default config trained on train+tune, scored on test; all four measures kept."""
    learner = Learner.parse(learner)
    t0 = time.perf_counter()
    config = default_config(learner)
    model, scores = _evaluate(config, merge_releases(triple.train, triple.tune), triple.test,
                              learner_seed(seed))
    seconds = time.perf_counter() - t0
    return RunRecord(triple.name, learner.value, None, UNTUNED, seed, repeat, None, scores,
                     dict(config.values), sorted(model.features_used()), seconds=seconds)


@dataclass(frozen=True)
class Cell:
    triple: ExperimentTriple
    learner: Learner
    mode: str
    seed: int
    repeat: int
    goal: Goal | None = None
    de: DEConfig | None = None

    def run(self) -> RunRecord:
        if self.mode == TUNED:
            return run_tuned(self.triple, self.learner, self.goal, self.de, self.seed, self.repeat)
        return run_untuned(self.triple, self.learner, self.seed, self.repeat)


def plan_cells(plan: ExperimentPlan, triples: Sequence[ExperimentTriple]) -> list[Cell]:
    if plan.triples is not None:
        by_name = {t.name: t for t in triples}
        unknown = [n for n in plan.triples if n not in by_name]
        if unknown:
            raise ValueError(f"unknown triples: {', '.join(unknown)}")
        triples = [by_name[n] for n in plan.triples]
    cells = []
    for t in triples:
        for learner in plan.learners:
            for r in range(plan.repeats):
                cells.append(Cell(t, learner, UNTUNED, cell_seed(plan.seed, t.name, learner.value, UNTUNED, r), r))
            if not param_space(learner):
                continue
            for goal in plan.goals:
                for np_ in plan.nps:
                    for r in range(plan.repeats):
                        s = cell_seed(plan.seed, t.name, learner.value, goal.value, np_, r)
                        cells.append(Cell(t, learner, TUNED, s, r, goal, plan.de(np_, goal, s)))
    return cells


def _run_cell(cell: Cell) -> RunRecord:
    return cell.run()


def run_plan(plan: ExperimentPlan, triples: Sequence[ExperimentTriple], jobs: int = 1,
             progress=None) -> list[RunRecord]:
    """Run every cell; records come back in plan order regardless of ``jobs``."""
    cells = plan_cells(plan, triples)
    records = []
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for rec in pool.map(_run_cell, cells):
                records.append(rec)
                if progress:
                    progress(rec, len(records), len(cells))
    else:
        for cell in cells:
            rec = cell.run()
            records.append(rec)
            if progress:
                progress(rec, len(records), len(cells))
    return records
