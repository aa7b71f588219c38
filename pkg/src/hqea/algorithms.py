"""HQEA, the QEA baseline and a conventional GA behind one interface.

All three return a :class:`RunTrace` holding the best-so-far fitness after
every generation. Randomness is drawn from named streams keyed by
(seed, concern, generation[, individual]) so that the QEA trajectory is not
perturbed by the extra search phases of HQEA.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .knapsack import Evaluator, KnapsackInstance
from .qea_core import (
    DEFAULT_DELTA_THETA,
    SolutionBank,
    migrate,
    new_individual,
    observe,
    qea_update,
    update_bank,
)
from .qhw_search import Population, SearchParams, local_search, remote_search
from .rng import Streams

ALGORITHMS = ("CGA", "QEA", "HQEA")


@dataclass(frozen=True)
class CGAParams:
    crossover_rate: float = 0.65
    mutation_rate: float = 0.05
    elitism: int = 1

    def __post_init__(self):
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.elitism < 0:
            raise ValueError("elitism must be >= 0")


@dataclass(frozen=True)
class OptimizerConfig:
    population_size: int = 10
    max_generations: int = 1000
    delta_theta: float = DEFAULT_DELTA_THETA
    migration_period: int = 100
    local: SearchParams = field(default_factory=SearchParams.local)
    remote: SearchParams = field(default_factory=SearchParams.remote)
    cga: CGAParams = field(default_factory=CGAParams)

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.migration_period < 1:
            raise ValueError("migration_period must be >= 1")
        if self.cga.elitism > self.population_size:
            raise ValueError("elitism cannot exceed population_size")

    def with_trials(self, trials: int) -> OptimizerConfig:
        return replace(
            self, local=self.local.with_(trials=trials), remote=self.remote.with_(trials=trials)
        )


@dataclass
class RunTrace:
    algorithm: str
    instance_id: str
    seed: int
    best_per_generation: list[int]
    evaluations_used: int = 0
    best_solution: np.ndarray | None = None

    def is_monotone(self) -> bool:
        b = self.best_per_generation
        return all(x <= y for x, y in zip(b, b[1:]))

    def best_at(self, generation: int) -> int:
        """Best-so-far after ``generation`` generations (1-based, inclusive)."""
        return self.best_per_generation[generation - 1]

    def csv_rows(self) -> list[tuple]:
        return [
            (self.algorithm, self.instance_id, self.seed, g, f)
            for g, f in enumerate(self.best_per_generation, start=1)
        ]


def _run_qea_family(inst: KnapsackInstance, config: OptimizerConfig, seed: int, with_search: bool, name: str) -> RunTrace:
    streams = Streams(seed)
    evaluator = Evaluator(inst)
    n = inst.num_items
    individuals = [new_individual(n) for _ in range(config.population_size)]
    bank = SolutionBank()
    trace = []

    for t in range(1, config.max_generations + 1):
        obs_rng = streams("observe", t)
        rep_rng = streams("repair", t)
        sols, fits = [], []
        for ind in individuals:
            x, f = evaluator(observe(ind, obs_rng), rep_rng)
            sols.append(x)
            fits.append(f)
        pop = Population(individuals, sols, fits)

        if with_search:
            pop = remote_search(pop, config.remote, evaluator, _refine_rngs(streams, "remote", t))
            pop = local_search(pop, config.local, evaluator, _refine_rngs(streams, "local", t))

        if not bank.empty:
            pop.individuals = [
                qea_update(ind, x, b, f >= bf, config.delta_theta)
                for ind, x, f, b, bf in zip(pop.individuals, pop.solutions, pop.fitness, bank.solutions, bank.fitness)
            ]
        bank = update_bank(bank, zip(pop.solutions, pop.fitness))
        bank = migrate(bank, t, config.migration_period)
        individuals = pop.individuals
        trace.append(bank.best_fitness)

    return RunTrace(name, inst.id, seed, trace, evaluator.evaluations, bank.best_solution)


def _refine_rngs(streams: Streams, phase: str, t: int) -> Callable[[int], np.random.Generator]:
    return lambda j: streams(phase, t, j)


def run_hqea(inst: KnapsackInstance, config: OptimizerConfig, seed: int) -> RunTrace:
    """Per generation: observe, repair, evaluate, remote search, local search,
    rotation update toward each slot's stored best, bank update, migration."""
    return _run_qea_family(inst, config, seed, True, "HQEA")


def run_qea(inst: KnapsackInstance, config: OptimizerConfig, seed: int) -> RunTrace:
    """HQEA with both walk-search phases removed."""
    return _run_qea_family(inst, config, seed, False, "QEA")


def roulette_probabilities(fitness) -> np.ndarray:
    """Selection probabilities proportional to fitness.

    Zero-fitness members get weight 1e-9 of the total so that an all-zero
    population is still selectable.
    """
    f = np.asarray(fitness)
    total = f.sum()
    if np.any(f == 0):
        w = f.astype(np.float64)
        w[f == 0] = 1e-9 * total if total > 0 else 1.0
        return w / w.sum()
    return np.asarray(f, dtype=np.float64) / float(total)


def _roulette_cdf(fitness) -> np.ndarray:
    f = np.asarray(fitness)
    if np.any(f == 0):
        return np.cumsum(roulette_probabilities(f))
    # integer prefix sums divided once: invariant under scaling all profits
    cum = np.cumsum(f.astype(np.int64))
    return cum / cum[-1]


def _roulette_pick(cdf: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(idx, cdf.size - 1)


def run_cga(inst: KnapsackInstance, config: OptimizerConfig, seed: int) -> RunTrace:
    """Generational GA with roulette-wheel selection and uniform crossover.

    Generation 1 scores a random population. Every later generation keeps
    the ``elitism`` fittest members and fills the rest with offspring
    (roulette parents, uniform crossover with prob. ``crossover_rate``,
    per-bit flips with prob. ``mutation_rate``, repair). Every member of
    each generation is scored, elites included.
    """
    streams = Streams(seed)
    evaluator = Evaluator(inst)
    p = config.cga
    size, n = config.population_size, inst.num_items

    init_rng = streams("cga-init", 0)
    rep_rng = streams("repair", 1)
    pop = [evaluator(init_rng.integers(0, 2, n, dtype=np.uint8), rep_rng) for _ in range(size)]
    best_x, best_f = max(pop, key=lambda s: s[1])
    trace = [best_f]

    for t in range(2, config.max_generations + 1):
        rng = streams("cga", t)
        rep_rng = streams("repair", t)
        fits = [f for _, f in pop]
        order = sorted(range(size), key=lambda i: (-fits[i], i))
        children = [pop[i][0] for i in order[: p.elitism]]
        cdf = _roulette_cdf(fits)
        while len(children) < size:
            a, b = _roulette_pick(cdf, rng, 2)
            c1, c2 = pop[a][0].copy(), pop[b][0].copy()
            if rng.random() < p.crossover_rate:
                swap = rng.random(n) < 0.5
                c1[swap], c2[swap] = pop[b][0][swap], pop[a][0][swap]
            for c in (c1, c2):
                if len(children) < size:
                    if p.mutation_rate > 0:
                        c ^= (rng.random(n) < p.mutation_rate).astype(np.uint8)
                    children.append(c)
        pop = [evaluator(c, rep_rng) for c in children]
        gen_x, gen_f = max(pop, key=lambda s: s[1])
        if gen_f > best_f:
            best_x, best_f = gen_x, gen_f
        trace.append(best_f)

    return RunTrace("CGA", inst.id, seed, trace, evaluator.evaluations, best_x)


RUNNERS = {"CGA": run_cga, "QEA": run_qea, "HQEA": run_hqea}


def run_algorithm(name: str, inst: KnapsackInstance, config: OptimizerConfig, seed: int) -> RunTrace:
    try:
        runner = RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}") from None
    return runner(inst, config, seed)
