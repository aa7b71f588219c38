"""0-1 knapsack model: instances, random repair, evaluation, exhaustive oracle."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PROFILES = ("strongly_correlated", "uncorrelated")
BRUTE_FORCE_LIMIT = 24


class InfeasibleSolution(ValueError):
    """Raised when an overweight bitstring reaches ``evaluate``."""


@dataclass(frozen=True, eq=False)
class KnapsackInstance:
    weights: np.ndarray
    profits: np.ndarray
    capacity: int
    id: str = "kp"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.int64)
        p = np.asarray(self.profits, dtype=np.int64)
        if w.ndim != 1 or w.shape != p.shape or w.size == 0:
            raise ValueError("weights and profits must be equal-length, nonempty vectors")
        if np.any(w <= 0) or np.any(p <= 0):
            raise ValueError("weights and profits must be positive integers")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        w.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "profits", p)
        object.__setattr__(self, "capacity", int(self.capacity))

    @property
    def num_items(self) -> int:
        return int(self.weights.size)

    def __eq__(self, other):
        if not isinstance(other, KnapsackInstance):
            return NotImplemented
        return (
            self.id == other.id
            and self.capacity == other.capacity
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.profits, other.profits)
        )

    def __hash__(self):
        return hash((self.id, self.capacity, self.weights.tobytes(), self.profits.tobytes()))

    def weight_of(self, x) -> int:
        return int(np.dot(self.weights, np.asarray(x, dtype=np.int64)))

    def is_feasible(self, x) -> bool:
        x = np.asarray(x)
        return x.shape == self.weights.shape and self.weight_of(x) <= self.capacity

    def scaled(self, factor: int) -> KnapsackInstance:
        """Same instance with every profit multiplied by ``factor``."""
        return KnapsackInstance(self.weights, self.profits * int(factor), self.capacity, self.id)

    # -- JSON: {"capacity", "id", "profits", "weights"}, sorted keys

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "capacity": self.capacity,
            "weights": [int(v) for v in self.weights],
            "profits": [int(v) for v in self.profits],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> KnapsackInstance:
        for key in ("capacity", "weights", "profits"):
            if key not in d:
                raise ValueError(f"instance is missing key {key!r}")
        vals = [d["capacity"], *d["weights"], *d["profits"]]
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
            raise ValueError("capacity, weights and profits must be integers")
        return cls(np.array(d["weights"]), np.array(d["profits"]), d["capacity"], str(d.get("id", "kp")))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> KnapsackInstance:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def instance_id(num_items: int, profile: str, seed: int) -> str:
    tag = {"strongly_correlated": "sc", "uncorrelated": "uc"}[profile]
    return f"kp{num_items}-{tag}-s{seed}"


def generate_instance(num_items: int, profile: str = "strongly_correlated", seed: int = 0) -> KnapsackInstance:
    """Random instance with integer weights in [1, 10].

    strongly_correlated: p_i = w_i + 5. uncorrelated: p_i uniform in [1, 10].
    Capacity is half the total weight, rounded up.
    """
    if num_items < 1:
        raise ValueError(f"num_items must be >= 1, got {num_items}")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    weights = rng.integers(1, 11, size=num_items)
    if profile == "strongly_correlated":
        profits = weights + 5
    else:
        profits = rng.integers(1, 11, size=num_items)
    capacity = math.ceil(int(weights.sum()) / 2)
    return KnapsackInstance(weights, profits, capacity, instance_id(num_items, profile, seed))


def evaluate(inst: KnapsackInstance, x) -> int:
    """Total profit of a feasible selection."""
    x = np.asarray(x)
    if x.shape != inst.weights.shape:
        raise ValueError(f"bitstring length {x.size} != instance size {inst.num_items}")
    if inst.weight_of(x) > inst.capacity:
        raise InfeasibleSolution(
            f"weight {inst.weight_of(x)} exceeds capacity {inst.capacity}; repair first"
        )
    return int(np.dot(inst.profits, x.astype(np.int64)))


def repair(inst: KnapsackInstance, x, rng: np.random.Generator) -> np.ndarray:
    """Make ``x`` feasible, then top it up.

    Overweight: drop selected items one at a time in uniformly random order
    until the load fits. Then visit the unselected items in uniformly random
    order and add each one that still fits.
    """
    x = np.array(x, dtype=np.uint8)
    if x.shape != inst.weights.shape:
        raise ValueError(f"bitstring length {x.size} != instance size {inst.num_items}")
    w = inst.weights
    chosen = x.nonzero()[0]
    load = int(w[chosen].sum())
    if load > inst.capacity:
        order = rng.permutation(chosen)
        removed = w[order].cumsum()
        # shortest removal prefix that brings the load under capacity
        cut = int(removed.searchsorted(load - inst.capacity)) + 1
        x[order[:cut]] = 0
        load -= int(removed[cut - 1])
    room = inst.capacity - load
    if room <= 0:
        return x
    order = rng.permutation((x == 0).nonzero()[0])
    if order.size == 0:
        return x
    fw = w[order]
    # items up to the first one that does not fit go in as a block
    prefix = fw.cumsum()
    take = int(prefix.searchsorted(room, side="right"))
    x[order[:take]] = 1
    if take:
        room -= int(prefix[take - 1])
    if take < order.size and room > 0:
        for item, wi in zip(order[take + 1:].tolist(), fw[take + 1:].tolist()):
            if wi <= room:
                x[item] = 1
                room -= wi
                if room == 0:
                    break
    return x


def brute_force_optimum(inst: KnapsackInstance) -> int:
    """Exact optimum by enumerating all 2^n subsets (n <= 24)."""
    n = inst.num_items
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{n} items exceeds the brute-force limit of {BRUTE_FORCE_LIMIT}")
    w = inst.weights.tolist()
    p = inst.profits.tolist()
    best = 0
    if n <= 16:
        for bits in itertools.product((0, 1), repeat=n):
            weight = sum(wi for wi, b in zip(w, bits) if b)
            if weight <= inst.capacity:
                best = max(best, sum(pi for pi, b in zip(p, bits) if b))
        return best
    # chunked enumeration for larger n: low half enumerated as a numpy table
    lo = n // 2
    masks = np.arange(1 << lo, dtype=np.int64)
    sel = (masks[:, None] >> np.arange(lo)) & 1
    lo_w = sel @ inst.weights[:lo]
    lo_p = sel @ inst.profits[:lo]
    for bits in itertools.product((0, 1), repeat=n - lo):
        hw = sum(wi for wi, b in zip(w[lo:], bits) if b)
        if hw > inst.capacity:
            continue
        hp = sum(pi for pi, b in zip(p[lo:], bits) if b)
        ok = lo_w <= inst.capacity - hw
        if ok.any():
            best = max(best, hp + int(lo_p[ok].max()))
    return best


class Evaluator:
    """Repair-then-evaluate callable that counts evaluations.

    ``evaluator(x, rng) -> (repaired_x, fitness)``. Every scored bitstring is
    checked for feasibility by ``evaluate``.
    """

    def __init__(self, inst: KnapsackInstance):
        self.instance = inst
        self.evaluations = 0

    def __call__(self, x, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        fixed = repair(self.instance, x, rng)
        fit = evaluate(self.instance, fixed)
        self.evaluations += 1
        return fixed, fit
