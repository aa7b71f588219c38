"""Hadamard-walk local and remote search.

Both operators perturb every angle of a selected individual by an angle
drawn from the walk distribution and keep the perturbed individual only if
one observe -> repair -> evaluate pass scores strictly higher. A short walk
(local) keeps moves within walk_steps*pi/n_max and is applied to the best
individuals; a walk as long as n_max (remote) reaches +-pi and is applied to
the worst ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .qea_core import QbitIndividual, observe, rotate_all
from .quantum_walk import sample_angles, walk_angle_distribution

LOCAL = "local"
REMOTE = "remote"

Evaluator = Callable[[np.ndarray, np.random.Generator], tuple[np.ndarray, int]]


@dataclass(frozen=True)
class SearchParams:
    walk_steps: int = 10
    n_max: int = 100
    trials: int = 5
    fraction: float = 0.2
    mode: str = LOCAL

    def __post_init__(self):
        if not 1 <= self.walk_steps <= self.n_max:
            raise ValueError(f"need 1 <= walk_steps <= n_max, got {self.walk_steps}, {self.n_max}")
        if self.trials < 0:
            raise ValueError(f"trials must be >= 0, got {self.trials}")
        if not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")
        if self.mode not in (LOCAL, REMOTE):
            raise ValueError(f"mode must be {LOCAL!r} or {REMOTE!r}, got {self.mode!r}")

    @classmethod
    def local(cls, **kw) -> SearchParams:
        return cls(**{"walk_steps": 10, **kw, "mode": LOCAL})

    @classmethod
    def remote(cls, **kw) -> SearchParams:
        return cls(**{"walk_steps": 100, **kw, "mode": REMOTE})

    def with_(self, **kw) -> SearchParams:
        return replace(self, **kw)


@dataclass
class Population:
    """Individuals with their current (repaired) observations and fitness."""

    individuals: list[QbitIndividual]
    solutions: list[np.ndarray]
    fitness: list[int]

    def __post_init__(self):
        if not len(self.individuals) == len(self.solutions) == len(self.fitness):
            raise ValueError("population fields differ in length")

    def __len__(self) -> int:
        return len(self.individuals)

    def copy(self) -> Population:
        return Population(list(self.individuals), list(self.solutions), list(self.fitness))


def select_individuals(fitnesses: Sequence[float], fraction: float, mode: str) -> list[int]:
    """Indices of the ceil(fraction * N) best (local) or worst (remote) individuals.

    Ties go to the lower index. The returned order is best-first for local
    and worst-first for remote.
    """
    n = len(fitnesses)
    if n == 0:
        raise ValueError("empty fitness vector")
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if mode not in (LOCAL, REMOTE):
        raise ValueError(f"unknown mode {mode!r}")
    k = min(n, math.ceil(fraction * n - 1e-9))
    if mode == LOCAL:
        order = sorted(range(n), key=lambda i: (-fitnesses[i], i))
    else:
        order = sorted(range(n), key=lambda i: (fitnesses[i], i))
    return order[:k]


def qhw_refine(
    ind: QbitIndividual,
    params: SearchParams,
    evaluator: Evaluator,
    rng: np.random.Generator,
    fitness: int | None = None,
    solution: np.ndarray | None = None,
    eval_rng: np.random.Generator | None = None,
) -> tuple[QbitIndividual, int, np.ndarray | None]:
    """Run ``params.trials`` walk-perturbation rounds on one individual.

    ``fitness``/``solution`` are the cached score of ``ind``; when omitted the
    individual is scored once first (one extra evaluation). Walk angles come
    from ``rng``; candidate scoring uses ``eval_rng`` (defaults to ``rng``).

    Returns the final individual, its fitness and the solution that earned it.
    """
    eval_rng = rng if eval_rng is None else eval_rng
    if fitness is None:
        solution, fitness = evaluator(observe(ind, eval_rng), eval_rng)
    if params.trials == 0:
        return ind, fitness, solution
    dist = walk_angle_distribution(params.walk_steps, params.n_max)
    for _ in range(params.trials):
        cand = rotate_all(ind, sample_angles(dist, rng, len(ind)))
        x, f = evaluator(observe(cand, eval_rng), eval_rng)
        if f > fitness:
            ind, fitness, solution = cand, f, x
    return ind, fitness, solution


def _search(
    pop: Population,
    params: SearchParams,
    evaluator: Evaluator,
    rng_for: Callable[[int], np.random.Generator],
) -> Population:
    out = pop.copy()
    if params.trials == 0:
        return out
    for j in select_individuals(pop.fitness, params.fraction, params.mode):
        ind, f, x = qhw_refine(
            pop.individuals[j], params, evaluator, rng_for(j),
            fitness=pop.fitness[j], solution=pop.solutions[j],
        )
        out.individuals[j], out.fitness[j], out.solutions[j] = ind, f, x
    return out


def local_search(pop, params, evaluator, rng_for) -> Population:
    """Refine the best ``params.fraction`` of ``pop`` with a short walk.

    ``rng_for(j)`` supplies the generator for individual ``j`` so that
    refinements are independent of each other and of the selection order.
    """
    if params.mode != LOCAL:
        params = params.with_(mode=LOCAL)
    return _search(pop, params, evaluator, rng_for)


def remote_search(pop, params, evaluator, rng_for) -> Population:
    """Refine the worst ``params.fraction`` of ``pop`` with a long walk."""
    if params.mode != REMOTE:
        params = params.with_(mode=REMOTE)
    return _search(pop, params, evaluator, rng_for)
