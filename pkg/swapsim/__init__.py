"""Stochastic simulation bench for GNSS-denied fixed-wing UAV navigation."""

from .config import RunConfig, load_run_config
from .navigation import NavigationSystem, register_navigation
from .runner import RunArtifacts, run_monte_carlo, run_single

__all__ = [
    "NavigationSystem",
    "RunArtifacts",
    "RunConfig",
    "load_run_config",
    "register_navigation",
    "run_monte_carlo",
    "run_single",
]
