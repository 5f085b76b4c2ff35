"""Single-objective differential evolution with early termination.

The population starts as the learner's default configuration plus ``np - 1``
uniformly random ones.  Each generation extrapolates one trial per member
from three other members, keeps the trial only when it scores strictly
better, and loses one life whenever the best score so far does not strictly
improve.  The search stops when no lives remain, so a run always costs
``np * (generations + 1)`` evaluations.

Randomness: the DE loop draws from ``numpy.random.default_rng(seed)``.
Every learner fit inside one tuning run uses the same seed, derived from the
DE seed by :func:`learner_seed`, so a configuration's score does not depend
on when it was evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .dataset import Release
from .learners import Config, Kind, Learner, ParamSpec, default_config, param_space, train
from .metrics import Goal, better, confusion, score as goal_score


class UnsupportedLearnerError(ValueError):
    pass


@dataclass(frozen=True)
class DEConfig:
    np: int = 10
    f: float = 0.75
    cr: float = 0.3
    life: int = 5
    goal: Goal = Goal.PREC
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "goal", Goal.parse(self.goal))
        if self.np < 4:
            raise ValueError("np must be at least 4")
        if not 0.0 <= self.cr <= 1.0:
            raise ValueError("cr must lie in [0, 1]")
        if self.f <= 0:
            raise ValueError("f must be positive")
        if self.life < 1:
            raise ValueError("life must be at least 1")


@dataclass(frozen=True)
class Candidate:
    config: Any
    score: float
    evaluated_at: int


@dataclass
class TuneResult:
    best: Candidate
    evaluations: int
    generations: int
    history: list[float]
    population: list[Candidate] = field(default_factory=list)

    def to_dict(self) -> dict:
        cfg = self.best.config
        values = dict(cfg.values) if isinstance(cfg, Config) else dict(cfg)
        return {"best_config": values, "best_score": self.best.score,
                "evaluations": self.evaluations, "generations": self.generations,
                "history": list(self.history)}


def learner_seed(seed: int) -> int:
    """The seed handed to every learner fit of a tuning run with DE seed ``seed``."""
    return int(np.random.SeedSequence([int(seed), 0x5EED]).generate_state(1, np.uint64)[0])


def trim(spec: ParamSpec, value: float):
    """Clamp to the legal range; integer parameters are then rounded half up."""
    value = min(max(float(value), spec.low), spec.high)
    if spec.kind is Kind.INTEGER:
        return int(math.floor(value + 0.5))
    return value


def random_value(spec: ParamSpec, rng: np.random.Generator):
    if spec.kind is Kind.BOOLEAN:
        return bool(rng.random() < 0.5)
    if spec.kind is Kind.INTEGER:
        return int(rng.integers(int(spec.low), int(spec.high) + 1))
    return float(rng.uniform(spec.low, spec.high))


def extrapolate(old: Mapping[str, Any], population: Sequence[Mapping[str, Any]],
                space: Sequence[ParamSpec], cr: float, f: float, rng: np.random.Generator,
                exclude: int | None = None) -> dict[str, Any]:
    """A trial configuration built from ``old`` and three other members.

    ``exclude`` is the position of ``old`` in ``population``; a, b and c are
    drawn without replacement from the remaining members.
    """
    pool = [j for j in range(len(population)) if j != exclude]
    if len(pool) < 3:
        raise ValueError("extrapolation needs three other population members")
    a, b, c = (population[j] for j in rng.choice(pool, size=3, replace=False))
    new = {}
    for spec in space:
        if rng.random() >= cr:
            new[spec.name] = old[spec.name]
        elif spec.kind is Kind.BOOLEAN:
            new[spec.name] = not old[spec.name]
        else:
            ai, bi, ci = (spec.effective(p[spec.name]) for p in (a, b, c))
            new[spec.name] = trim(spec, ai + f * (bi - ci))
    return new


def differential_evolution(space: Sequence[ParamSpec], objective: Callable[[dict], float],
                           de: DEConfig, initial: Mapping[str, Any] | None = None,
                           map_fn: Callable[[Callable, Iterable], Iterable] = map) -> TuneResult:
    """Run DE over ``space``; ``objective`` is called once per evaluation.

    ``map_fn`` evaluates one generation's trials (e.g. an executor's
    ``map``); results do not depend on it.
    """
    space = list(space)
    if not space:
        raise ValueError("empty parameter space")
    rng = np.random.default_rng(de.seed)
    goal = de.goal
    start = [dict(initial)] if initial is not None else []
    while len(start) < de.np:
        start.append({s.name: random_value(s, rng) for s in space})
    scores = list(map_fn(objective, start))
    population = [Candidate(v, float(s), k) for k, (v, s) in enumerate(zip(start, scores))]
    evaluations = len(population)

    def best_of(cands: Sequence[Candidate]) -> Candidate:
        best = cands[0]
        for c in cands[1:]:
            if better(goal, c.score, best.score):
                best = c
        return best

    best = best_of(population)
    history = [best.score]
    life = de.life
    generations = 0
    while life > 0:
        values = [p.config for p in population]
        trials = [extrapolate(values[i], values, space, de.cr, de.f, rng, exclude=i)
                  for i in range(de.np)]
        trial_scores = list(map_fn(objective, trials))
        new_generation = []
        for i, (trial, s) in enumerate(zip(trials, trial_scores)):
            cand = Candidate(trial, float(s), evaluations)
            evaluations += 1
            new_generation.append(cand if better(goal, cand.score, population[i].score) else population[i])
        population = new_generation
        generations += 1
        gen_best = best_of(population)
        if better(goal, gen_best.score, best.score):
            best = gen_best
        else:
            life -= 1
        history.append(best.score)
    return TuneResult(best, evaluations, generations, history, population)


class Scorer:
    """Train on one release, score on another; counts every call.

    Scores of repeated configurations are served from a cache, but each
    call still counts as one evaluation.
    """

    def __init__(self, train_data: Release, tune_data: Release, goal: Goal | str, seed: int = 0):
        self.train_data = train_data
        self.tune_data = tune_data
        self.goal = Goal.parse(goal)
        self.seed = seed
        self.evaluations = 0
        self._cache: dict[tuple, float] = {}

    def __call__(self, config: Config) -> float:
        self.evaluations += 1
        key = config.key()
        if key not in self._cache:
            self._cache[key] = score(config, self.train_data, self.tune_data, self.goal, self.seed)
        return self._cache[key]


def score(config: Config, train_data: Release, tune_data: Release, goal: Goal | str, seed: int = 0) -> float:
    model = train(config, train_data, seed)
    cm = confusion(tune_data.labels, model.predict_many(tune_data.X))
    return goal_score(goal, cm)


def de_tune(learner: Learner | str, train_data: Release, tune_data: Release, de: DEConfig,
            map_fn: Callable = map) -> TuneResult:
    """Tune ``learner`` on (train, tune) with default-seeded DE."""
    learner = Learner.parse(learner)
    space = param_space(learner)
    if not space:
        raise UnsupportedLearnerError(f"learner {learner.value!r} has no tunable parameters")
    scorer = Scorer(train_data, tune_data, de.goal, learner_seed(de.seed))

    def objective(values: dict) -> float:
        return scorer(Config(learner, values))

    result = differential_evolution(space, objective, de, default_config(learner).values, map_fn)
    wrap = lambda c: Candidate(Config(learner, c.config), c.score, c.evaluated_at)
    return TuneResult(wrap(result.best), result.evaluations, result.generations, result.history,
                      [wrap(c) for c in result.population])
