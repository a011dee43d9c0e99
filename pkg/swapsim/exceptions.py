"""Errors raised by the simulation."""

from __future__ import annotations

from collections.abc import Callable
import functools


class SimulationError(Exception):
    """Base class for all simulation errors."""


class ConfigError(SimulationError):
    """A configuration file is missing, unreadable or invalid."""


class ConstraintError(SimulationError):
    """A restricted draw could not be satisfied within the redraw cap."""


class EnvelopeError(SimulationError):
    """A model was evaluated outside its validity envelope."""


class AtmosphereError(EnvelopeError):
    """Pressure altitude outside the modeled atmospheric layer."""


class DivergenceError(SimulationError):
    """The truth integration produced a non-finite state."""

    def __init__(self, message: str, time: float, component: str | None = None) -> None:
        """Initialize with the failure time and offending component."""
        super().__init__(message)
        self.time = time
        self.component = component


class PlanError(SimulationError):
    """A mission plan is malformed."""


class NavigationError(SimulationError):
    """A navigation implementation failed or is unknown."""


class MetricsError(SimulationError):
    """Error series cannot be combined."""


def convert_exception[**_P, _R](func: Callable[_P, _R]) -> Callable[_P, _R]:
    """Return decorator converting numerical failures into a divergence error."""

    @functools.wraps(func)
    def _convert_exception(*args: _P.args, **kwargs: _P.kwargs) -> _R:
        try:
            return func(*args, **kwargs)
        except (
            FloatingPointError,
            ZeroDivisionError,
            OverflowError,
            ValueError,
        ) as exception:
            raise DivergenceError(
                f"Numerical failure during {func.__name__}: {exception}", float("nan")
            ) from exception

    return _convert_exception
