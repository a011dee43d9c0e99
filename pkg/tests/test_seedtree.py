"""Tests for the seed hierarchy."""

import numpy as np
import pytest

from swapsim.const import MODULE_SEED_NAMES
from swapsim.exceptions import ConstraintError
from swapsim.seedtree import (
    StochasticSampler,
    derive_module_seeds,
    derive_run_seeds,
    derive_trajectory_seeds,
    sample_constrained,
    sample_discrete_uniform,
    sample_normal,
    seed_table,
)


def test_trajectory_seeds_are_prefix_stable():
    """Test a shorter seed list is a prefix of a longer one."""
    short = derive_trajectory_seeds(7, 5)
    long = derive_trajectory_seeds(7, 50)

    assert long[:5] == short
    assert len(set(long)) == 50
    assert all(0 <= seed < 2**64 for seed in long)


def test_trajectory_seeds_depend_on_master():
    """Test different master seeds give different trajectory seeds."""
    assert derive_trajectory_seeds(1, 3) != derive_trajectory_seeds(2, 3)


def test_invalid_run_count():
    """Test a run count below one is rejected."""
    with pytest.raises(ValueError):
        derive_trajectory_seeds(1, 0)


def test_module_seeds_in_draw_order():
    """Test module seeds are named in the fixed draw order."""
    seeds = derive_module_seeds(12345)

    assert [name for name, _ in seeds] == list(MODULE_SEED_NAMES)
    assert seeds["ACC"] == seeds.module_seeds[0]
    assert seeds["ALIGN"] == seeds.module_seeds[-1]
    assert derive_module_seeds(12345) == seeds


def test_run_seeds_match_table():
    """Test a single run reproduces its row of the seed table."""
    table = seed_table(3, 10)

    assert derive_run_seeds(3, 10, 7) == table[6]
    assert derive_run_seeds(3, 100, 7) == table[6]
    assert table[6].run_index == 7


def test_run_index_out_of_range():
    """Test run indices outside the batch are rejected."""
    with pytest.raises(ValueError):
        derive_run_seeds(1, 10, 0)
    with pytest.raises(ValueError):
        derive_run_seeds(1, 10, 11)


def test_replace_overrides_one_seed():
    """Test replacing one module seed leaves the others untouched."""
    seeds = derive_module_seeds(99)
    replaced = seeds.replace(WIND=42)

    assert replaced["WIND"] == 42
    for name in MODULE_SEED_NAMES:
        if name != "WIND":
            assert replaced[name] == seeds[name]


def test_sampler_reproducible():
    """Test two samplers on the same seed draw the same stream."""
    first = StochasticSampler(5)
    second = StochasticSampler(5)

    assert [first.normal(1.0, 2.0) for _ in range(5)] == [
        second.normal(1.0, 2.0) for _ in range(5)
    ]
    np.testing.assert_array_equal(first.standard_normal(3), second.standard_normal(3))


def test_discrete_uniform_inclusive():
    """Test discrete uniform draws cover both bounds."""
    sampler = StochasticSampler(11)
    draws = {sampler.discrete_uniform(1, 3) for _ in range(200)}

    assert draws == {1, 2, 3}


def test_constrained_draw_satisfies_predicate():
    """Test restricted draws always satisfy their predicate."""
    sampler = StochasticSampler(1)
    values = [
        sample_constrained(sampler, lambda s: s.normal(0.0, 1.0), lambda v: v > 0.5)
        for _ in range(100)
    ]

    assert min(values) > 0.5


def test_constrained_draw_gives_up():
    """Test an unsatisfiable restriction raises after the redraw cap."""
    sampler = StochasticSampler(1)

    with pytest.raises(ConstraintError):
        sampler.constrained(lambda s: s.normal(0.0, 1.0), lambda v: v > 100.0, max_redraws=10)


def test_sampling_helpers_match_sampler():
    """Test the free sampling helpers draw from the sampler stream."""
    helpers = StochasticSampler(21)
    methods = StochasticSampler(21)

    assert sample_normal(helpers, 3.0, 0.5) == methods.normal(3.0, 0.5)
    assert sample_discrete_uniform(helpers, -2, 2) == methods.discrete_uniform(-2, 2)
    assert sample_normal(helpers, 0.0, 0.0) == 0.0
