"""Two-level seed hierarchy and sampling primitives.

A master seed drives one generator that yields a trajectory seed per run.
Each trajectory seed drives a second generator that yields the module seeds,
always in the order of ``MODULE_SEED_NAMES``. Every stochastic quantity of a
run is drawn from a ``StochasticSampler`` built on one of those module seeds.

All generators are numpy ``PCG64`` bit generators. Seeds are raw 64-bit
outputs, so a list of ``n`` trajectory seeds is a prefix of any longer list
derived from the same master seed.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass
import logging

import numpy as np

from .const import MAX_CONSTRAINT_REDRAWS, MODULE_SEED_NAMES
from .exceptions import ConstraintError

_LOGGER = logging.getLogger(__name__)

_UINT64_MAX = np.iinfo(np.uint64).max


def _raw_seeds(seed: int, count: int) -> list[int]:
    """Return count full-range unsigned 64-bit draws from a seed."""
    generator = np.random.Generator(np.random.PCG64(seed))
    draws = generator.integers(0, _UINT64_MAX, size=count, dtype=np.uint64, endpoint=True)
    return [int(value) for value in draws]


def derive_trajectory_seeds(master: int, run_count: int) -> list[int]:
    """Return one trajectory seed per run for a master seed."""
    if run_count < 1:
        raise ValueError(f"Run count must be at least 1, got {run_count}")
    return _raw_seeds(master, run_count)


@dataclass(frozen=True)
class TrajectorySeedSet:
    """Trajectory seed of a run and its named module seeds."""

    run_index: int
    trajectory_seed: int
    module_seeds: tuple[int, ...]

    def __getitem__(self, name: str) -> int:
        """Return the module seed with the given name."""
        return self.module_seeds[MODULE_SEED_NAMES.index(name)]

    def __iter__(self) -> Iterator[tuple[str, int]]:
        """Iterate over (name, seed) pairs in draw order."""
        return iter(zip(MODULE_SEED_NAMES, self.module_seeds, strict=True))

    def sampler(self, name: str) -> StochasticSampler:
        """Return a fresh sampler on the named module seed."""
        return StochasticSampler(self[name])

    def replace(self, **seeds: int) -> TrajectorySeedSet:
        """Return a copy with some module seeds overridden."""
        values = list(self.module_seeds)
        for name, value in seeds.items():
            values[MODULE_SEED_NAMES.index(name)] = value
        return TrajectorySeedSet(self.run_index, self.trajectory_seed, tuple(values))


def derive_module_seeds(trajectory_seed: int, run_index: int = 1) -> TrajectorySeedSet:
    """Return the module seeds of one trajectory seed."""
    seeds = _raw_seeds(trajectory_seed, len(MODULE_SEED_NAMES))
    return TrajectorySeedSet(run_index, trajectory_seed, tuple(seeds))


def derive_run_seeds(master: int, run_count: int, run_index: int) -> TrajectorySeedSet:
    """Return the seed set of run ``run_index`` (1-based) of a batch."""
    if not 1 <= run_index <= run_count:
        raise ValueError(f"Run index {run_index} outside 1..{run_count}")
    trajectory_seed = derive_trajectory_seeds(master, run_index)[-1]
    return derive_module_seeds(trajectory_seed, run_index)


class StochasticSampler:
    """Single-owner random stream built on one module seed."""

    def __init__(self, seed: int) -> None:
        """Initialize the generator."""
        self.seed = seed
        self._generator = np.random.Generator(np.random.PCG64(seed))

    def normal(self, mean: float, std: float) -> float:
        """Draw from N(mean, std²)."""
        return mean + std * float(self._generator.standard_normal())

    def standard_normal(self, size: int) -> np.ndarray:
        """Draw a vector of independent standard normals."""
        return self._generator.standard_normal(size)

    def discrete_uniform(self, low: int, high: int) -> int:
        """Draw an integer uniformly from [low, high], both included."""
        return int(self._generator.integers(low, high, endpoint=True))

    def constrained[_T](
        self,
        draw: Callable[[StochasticSampler], _T],
        predicate: Callable[[_T], bool],
        max_redraws: int = MAX_CONSTRAINT_REDRAWS,
    ) -> _T:
        """Redraw a single parameter until its restriction holds."""
        for _ in range(max_redraws + 1):
            value = draw(self)
            if predicate(value):
                return value
        raise ConstraintError(
            f"Restriction not satisfied after {max_redraws} redraws (seed {self.seed})"
        )


def sample_normal(sampler: StochasticSampler, mean: float, std: float) -> float:
    """Draw from N(mean, std²)."""
    return sampler.normal(mean, std)


def sample_discrete_uniform(sampler: StochasticSampler, low: int, high: int) -> int:
    """Draw an integer uniformly from [low, high]."""
    return sampler.discrete_uniform(low, high)


def sample_constrained[_T](
    sampler: StochasticSampler,
    draw: Callable[[StochasticSampler], _T],
    predicate: Callable[[_T], bool],
) -> _T:
    """Draw from a base distribution restricted by a predicate."""
    return sampler.constrained(draw, predicate)


def seed_table(master: int, run_count: int) -> list[TrajectorySeedSet]:
    """Return the seed sets of every run of a batch."""
    _LOGGER.debug("Deriving seed table for master %d, %d runs", master, run_count)
    return [
        derive_module_seeds(seed, index)
        for index, seed in enumerate(derive_trajectory_seeds(master, run_count), start=1)
    ]
