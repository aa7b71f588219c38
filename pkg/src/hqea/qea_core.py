"""Q-bit individuals, observation, rotation-gate updates, solution bank, migration.

An individual stores one angle theta_i per q-bit; the amplitudes are
alpha_i = cos(theta_i) and beta_i = sin(theta_i), and observing the q-bit
yields 1 with probability sin^2(theta_i). Angles are never clamped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_DELTA_THETA = 0.01 * math.pi
INITIAL_THETA = math.pi / 4
_ZERO_TOL = 1e-12

# (x_i, b_i, f(x) >= f(b)) -> rotate toward b_i?
# Only a worse x that disagrees with b is pulled toward b.
ROTATION_TABLE: dict[tuple[int, int, bool], bool] = {
    (0, 0, False): False,
    (0, 0, True): False,
    (0, 1, False): True,
    (0, 1, True): False,
    (1, 0, False): True,
    (1, 0, True): False,
    (1, 1, False): False,
    (1, 1, True): False,
}


@dataclass(frozen=True, eq=False)
class QbitIndividual:
    thetas: np.ndarray

    def __post_init__(self):
        t = np.array(self.thetas, dtype=np.float64)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("thetas must be a nonempty vector")
        if not np.all(np.isfinite(t)):
            raise ValueError("thetas must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "thetas", t)

    def __len__(self) -> int:
        return self.thetas.size

    def __eq__(self, other):
        if not isinstance(other, QbitIndividual):
            return NotImplemented
        return np.array_equal(self.thetas, other.thetas)

    @property
    def alphas(self) -> np.ndarray:
        return np.cos(self.thetas)

    @property
    def betas(self) -> np.ndarray:
        return np.sin(self.thetas)

    @property
    def prob_one(self) -> np.ndarray:
        return np.sin(self.thetas) ** 2

    def to_json(self) -> str:
        return json.dumps({"thetas": [float(t) for t in self.thetas]})

    @classmethod
    def from_json(cls, text: str) -> QbitIndividual:
        data = json.loads(text)
        ind = cls(np.asarray(data["thetas"], dtype=np.float64))
        if not np.allclose(ind.alphas**2 + ind.betas**2, 1.0, rtol=0, atol=1e-12):
            raise ValueError("deserialized individual is not normalized")
        return ind


def new_individual(num_bits: int) -> QbitIndividual:
    """Uniform superposition: every theta_i = pi/4."""
    if num_bits < 1:
        raise ValueError(f"num_bits must be >= 1, got {num_bits}")
    return QbitIndividual(np.full(num_bits, INITIAL_THETA))


def observe(ind: QbitIndividual, rng: np.random.Generator) -> np.ndarray:
    """Collapse each q-bit independently: bit_i = 1 with probability sin^2(theta_i)."""
    return (rng.random(ind.thetas.size) < ind.prob_one).astype(np.uint8)


def rotate_all(ind: QbitIndividual, deltas) -> QbitIndividual:
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.shape != ind.thetas.shape:
        raise ValueError(f"{deltas.size} deltas for {ind.thetas.size} q-bits")
    return QbitIndividual(ind.thetas + deltas)


def rotation_direction(thetas: np.ndarray, target) -> np.ndarray:
    """Sign (+1, -1 or 0) that moves sin^2(theta) toward each target bit.

    Quadrant is read from alpha*beta. On the axes (alpha = 0 or beta = 0)
    the q-bit is either already at the target (0) or any direction helps,
    in which case +1 is used.
    """
    target = np.asarray(target)
    a = np.cos(thetas)
    b = np.sin(thetas)
    ab = a * b
    on_alpha_axis = np.abs(a) < _ZERO_TOL  # P(1) == 1
    on_beta_axis = np.abs(b) < _ZERO_TOL  # P(1) == 0
    sign = np.where(ab > 0, 1.0, -1.0)
    sign = np.where(target == 1, sign, -sign)
    sign = np.where(on_alpha_axis, np.where(target == 1, 0.0, 1.0), sign)
    sign = np.where(on_beta_axis, np.where(target == 1, 1.0, 0.0), sign)
    return sign


def qea_update(
    ind: QbitIndividual,
    x,
    b,
    x_not_worse: bool,
    delta_theta: float = DEFAULT_DELTA_THETA,
) -> QbitIndividual:
    """Rotation-gate update of ``ind`` from its observation ``x`` and stored best ``b``.

    Each angle moves by 0 or +-delta_theta according to ``ROTATION_TABLE``.
    """
    x = np.asarray(x)
    b = np.asarray(b)
    if x.shape != ind.thetas.shape or b.shape != ind.thetas.shape:
        raise ValueError("x, b and individual must have equal length")
    if x_not_worse:
        # every row with f(x) >= f(b) has zero rotation
        return ind
    active = x != b
    if not active.any():
        return ind
    step = np.where(active, rotation_direction(ind.thetas, b) * delta_theta, 0.0)
    return QbitIndividual(ind.thetas + step)


@dataclass(frozen=True)
class SolutionBank:
    """Per-slot best solutions plus the global best seen so far."""

    solutions: tuple[np.ndarray, ...] = ()
    fitness: tuple[int, ...] = ()
    best_solution: np.ndarray | None = None
    best_fitness: int | None = None

    def __len__(self) -> int:
        return len(self.solutions)

    @property
    def empty(self) -> bool:
        return not self.solutions

    @property
    def global_best(self) -> tuple[np.ndarray | None, int | None]:
        return self.best_solution, self.best_fitness


def update_bank(bank: SolutionBank, population: Sequence[tuple[np.ndarray, int]]) -> SolutionBank:
    """Slot-wise elitist merge; ties keep the incumbent."""
    population = list(population)
    if not population:
        raise ValueError("population is empty")
    if bank.empty:
        sols = tuple(np.array(x, dtype=np.uint8) for x, _ in population)
        fits = tuple(int(f) for _, f in population)
    else:
        if len(population) != len(bank):
            raise ValueError(f"population size {len(population)} != bank size {len(bank)}")
        sols, fits = [], []
        for old_x, old_f, (x, f) in zip(bank.solutions, bank.fitness, population):
            if f > old_f:
                sols.append(np.array(x, dtype=np.uint8))
                fits.append(int(f))
            else:
                sols.append(old_x)
                fits.append(old_f)
        sols, fits = tuple(sols), tuple(fits)
    j = int(np.argmax(fits))
    best_x, best_f = bank.best_solution, bank.best_fitness
    if best_f is None or fits[j] > best_f:
        best_x, best_f = sols[j], fits[j]
    return SolutionBank(sols, fits, best_x, best_f)


def migrate(bank: SolutionBank, t: int, period: int) -> SolutionBank:
    """Global migration: every ``period`` generations all slots take the global best."""
    if period < 1:
        raise ValueError(f"migration period must be >= 1, got {period}")
    if t % period != 0 or bank.empty:
        return bank
    n = len(bank)
    return SolutionBank(
        tuple(bank.best_solution for _ in range(n)),
        (bank.best_fitness,) * n,
        bank.best_solution,
        bank.best_fitness,
    )
