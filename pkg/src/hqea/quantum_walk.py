"""
Discrete-time Hadamard walk on the line and the rotation-angle
distribution derived from it.

The coin is the symmetric Hadamard coin

    H = (1/sqrt(2)) * [[1, i],
                       [i, 1]]

acting on the chirality pair (a0, a1) at every lattice site. After the coin,
chirality 0 shifts one site left (k -> k-1) and chirality 1 one site right
(k -> k+1). The walk starts at the origin in the state
(a0, a1) = (i/sqrt(2), 1/sqrt(2)).

Swapping the shift convention mirrors every distribution through k = 0;
``run_walk(n, mirrored=True)`` exposes the opposite convention so the
equivalence can be checked.

Positions are mapped onto rotation angles by k -> k * pi / n_max, so the
lattice [-n_max, n_max] covers [-pi, pi].
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "WalkState",
    "PositionDistribution",
    "AngleDistribution",
    "init_walk",
    "step_walk",
    "run_walk",
    "to_angle_distribution",
    "sample_angle",
    "sample_angles",
    "variance",
    "walk_angle_distribution",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class WalkState:
    """Amplitudes of an n-step walk, indexed by position k in [-n, n].

    ``psi0[k + n]`` and ``psi1[k + n]`` hold the chirality-0 and chirality-1
    amplitudes at position k.
    """

    num_steps_total: int
    steps_taken: int
    psi0: np.ndarray
    psi1: np.ndarray

    def __post_init__(self):
        size = 2 * self.num_steps_total + 1
        if self.psi0.shape != (size,) or self.psi1.shape != (size,):
            raise ValueError(f"amplitude arrays must have shape ({size},)")
        self.psi0.setflags(write=False)
        self.psi1.setflags(write=False)

    @property
    def positions(self) -> np.ndarray:
        n = self.num_steps_total
        return np.arange(-n, n + 1)

    def amplitude(self, chirality: int, position: int) -> complex:
        n = self.num_steps_total
        if abs(position) > n:
            return 0j
        arr = self.psi0 if chirality == 0 else self.psi1
        return complex(arr[position + n])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi0) ** 2 + np.abs(self.psi1) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.psi0) ** 2 + np.abs(self.psi1) ** 2


@dataclass(frozen=True)
class PositionDistribution:
    """Probability mass over consecutive lattice positions.

    ``positions`` is sorted ascending; zero-probability sites (wrong parity
    or never reached) may be present.
    """

    positions: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        if self.positions.shape != self.probabilities.shape:
            raise ValueError("positions and probabilities differ in shape")
        if self.positions.size == 0:
            raise ValueError("empty distribution")
        if np.any(self.probabilities < 0):
            raise ValueError("negative probability")
        self.positions.setflags(write=False)
        self.probabilities.setflags(write=False)

    def __getitem__(self, position: int) -> float:
        idx = np.searchsorted(self.positions, position)
        if idx < self.positions.size and self.positions[idx] == position:
            return float(self.probabilities[idx])
        return 0.0

    def support(self, tol: float = 1e-15) -> dict[int, float]:
        """Positions carrying more than ``tol`` probability."""
        keep = self.probabilities > tol
        return {
            int(k): float(p)
            for k, p in zip(self.positions[keep], self.probabilities[keep])
        }

    def total(self) -> float:
        return float(self.probabilities.sum())

    def mean(self) -> float:
        return float(np.dot(self.positions, self.probabilities))


@dataclass(frozen=True)
class AngleDistribution:
    """Rotation angles k*pi/n_max with their probabilities, ordered by k.

    The cumulative table used for inverse-CDF sampling is built once at
    construction.
    """

    positions: np.ndarray
    probabilities: np.ndarray
    scale: int
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError(f"n_max must be >= 1, got {self.scale}")
        if self.positions.size == 0:
            raise ValueError("empty angle distribution")
        if np.any(np.abs(self.positions) > self.scale):
            raise ValueError("position outside [-n_max, n_max]")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("positions must be strictly increasing")
        cdf = np.cumsum(self.probabilities)
        cdf /= cdf[-1]
        object.__setattr__(self, "_cdf", cdf)
        for arr in (self.positions, self.probabilities, cdf):
            arr.setflags(write=False)

    @property
    def n_max(self) -> int:
        return self.scale

    @property
    def angles(self) -> np.ndarray:
        return self.positions * (math.pi / self.scale)

    @property
    def entries(self) -> list[tuple[float, float]]:
        return [(float(a), float(p)) for a, p in zip(self.angles, self.probabilities)]

    @classmethod
    def point_mass(cls, position: int, n_max: int) -> AngleDistribution:
        return cls(np.array([position]), np.array([1.0]), n_max)


def init_walk(n: int) -> WalkState:
    """Walk of ``n`` total steps, all amplitude at the origin."""
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    psi0 = np.zeros(2 * n + 1, dtype=np.complex128)
    psi1 = np.zeros(2 * n + 1, dtype=np.complex128)
    psi0[n] = 1j * _SQRT1_2
    psi1[n] = _SQRT1_2
    return WalkState(n, 0, psi0, psi1)


def step_walk(state: WalkState, mirrored: bool = False) -> WalkState:
    """Apply one coin flip and one conditional shift."""
    if state.steps_taken >= state.num_steps_total:
        raise ValueError(
            f"walk already took all {state.num_steps_total} steps"
        )
    a0, a1 = state.psi0, state.psi1
    c0 = (a0 + 1j * a1) * _SQRT1_2
    c1 = (1j * a0 + a1) * _SQRT1_2
    new0 = np.zeros_like(a0)
    new1 = np.zeros_like(a1)
    if mirrored:
        new0[1:] = c0[:-1]
        new1[:-1] = c1[1:]
    else:
        # chirality 0 -> k-1, chirality 1 -> k+1; edge amplitudes are zero
        new0[:-1] = c0[1:]
        new1[1:] = c1[:-1]
    return WalkState(state.num_steps_total, state.steps_taken + 1, new0, new1)


def run_walk(n: int, mirrored: bool = False) -> PositionDistribution:
    """Position distribution after exactly ``n`` steps from the initial state."""
    state = init_walk(n)
    for _ in range(n):
        state = step_walk(state, mirrored=mirrored)
    return PositionDistribution(state.positions, state.probabilities())


def to_angle_distribution(dist: PositionDistribution, n_max: int) -> AngleDistribution:
    """Map lattice positions to angles k*pi/n_max.

    Raises ``ValueError`` if a position carrying probability lies outside
    [-n_max, n_max]; zero-probability padding outside the range is dropped.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    inside = np.abs(dist.positions) <= n_max
    if np.any(dist.probabilities[~inside] > 0):
        bad = dist.positions[~inside & (dist.probabilities > 0)]
        raise ValueError(f"positions {bad.tolist()} outside [-{n_max}, {n_max}]")
    return AngleDistribution(
        dist.positions[inside].copy(), dist.probabilities[inside].copy(), n_max
    )


def sample_angle(dist: AngleDistribution, rng: np.random.Generator) -> float:
    """Draw one angle by inverse CDF over positions in ascending order."""
    return float(sample_angles(dist, rng, 1)[0])


def sample_angles(dist: AngleDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` independent angles; one uniform draw per angle."""
    u = rng.random(size)
    idx = np.searchsorted(dist._cdf, u, side="right")
    np.minimum(idx, dist.positions.size - 1, out=idx)
    return dist.positions[idx] * (math.pi / dist.scale)


def variance(dist: PositionDistribution) -> float:
    """E[k^2] - E[k]^2 in squared lattice units."""
    k = dist.positions.astype(float)
    p = dist.probabilities
    mean = float(np.dot(k, p))
    return float(np.dot(k * k, p)) - mean * mean


@functools.lru_cache(maxsize=64)
def walk_angle_distribution(walk_steps: int, n_max: int) -> AngleDistribution:
    """Cached ``to_angle_distribution(run_walk(walk_steps), n_max)``.

    Returned objects are read-only, so sharing them across threads is safe.
    """
    if walk_steps > n_max:
        raise ValueError(f"walk_steps {walk_steps} exceeds n_max {n_max}")
    return to_angle_distribution(run_walk(walk_steps), n_max)
