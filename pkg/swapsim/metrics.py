"""Navigation error metrics.

Errors are estimate minus truth at every navigation epoch. Per-run
(trajectory) metrics reduce one series; aggregated metrics reduce the
per-run metrics across runs; final-state metrics reduce the last error of
every run; time-aggregated metrics reduce across runs at every epoch.
Standard deviations are population ones throughout.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .const import DEFAULT_DRIFT_THRESHOLD, DEFAULT_RATIO_THRESHOLD
from .earth import local_offset
from .exceptions import MetricsError
from .navigation import EstimatedState
from .rotations import quat_minus, wrap_degrees

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class ErrorVariableDescription:
    """Describes one error variable and how to compute it."""

    key: str
    name: str
    unit: str
    error: Callable[[EstimatedState, EstimatedState], float]
    angular: bool = False
    nonnegative: bool = False


def _signed(get_value: Callable[[EstimatedState], float]) -> Callable[
    [EstimatedState, EstimatedState], float
]:
    return lambda estimate, truth: get_value(estimate) - get_value(truth)


def _angular(get_value: Callable[[EstimatedState], float]) -> Callable[
    [EstimatedState, EstimatedState], float
]:
    return lambda estimate, truth: wrap_degrees(
        math.degrees(get_value(estimate)) - math.degrees(get_value(truth))
    )


def _degrees(get_value: Callable[[EstimatedState], float]) -> Callable[
    [EstimatedState, EstimatedState], float
]:
    return lambda estimate, truth: math.degrees(get_value(estimate) - get_value(truth))


def _attitude_error(estimate: EstimatedState, truth: EstimatedState) -> float:
    return math.degrees(float(np.linalg.norm(quat_minus(estimate.attitude, truth.attitude))))


def _horizontal_position_error(estimate: EstimatedState, truth: EstimatedState) -> float:
    north, east = local_offset(
        truth.position, estimate.position.longitude, estimate.position.latitude
    )
    return math.hypot(north, east)


def _ground_speed_error(estimate: EstimatedState, truth: EstimatedState) -> float:
    return math.hypot(
        estimate.velocity_ned[0] - truth.velocity_ned[0],
        estimate.velocity_ned[1] - truth.velocity_ned[1],
    )


ERROR_VARIABLES: list[ErrorVariableDescription] = [
    ErrorVariableDescription(
        key="psi", name="Yaw", unit="deg", error=_angular(lambda s: s.euler[0]), angular=True
    ),
    ErrorVariableDescription(
        key="theta", name="Pitch", unit="deg", error=_degrees(lambda s: s.euler[1])
    ),
    ErrorVariableDescription(
        key="xi", name="Roll", unit="deg", error=_angular(lambda s: s.euler[2]), angular=True
    ),
    ErrorVariableDescription(
        key="h", name="Geometric altitude", unit="m", error=_signed(lambda s: s.position.altitude)
    ),
    ErrorVariableDescription(
        key="vtas", name="True airspeed", unit="m/s", error=_signed(lambda s: s.airspeed)
    ),
    ErrorVariableDescription(
        key="alpha", name="Angle of attack", unit="deg", error=_degrees(lambda s: s.alpha)
    ),
    ErrorVariableDescription(
        key="beta", name="Sideslip", unit="deg", error=_degrees(lambda s: s.beta)
    ),
    ErrorVariableDescription(
        key="Hp", name="Pressure altitude", unit="m", error=_signed(lambda s: s.pressure_altitude)
    ),
    ErrorVariableDescription(
        key="chi", name="Bearing", unit="deg", error=_angular(lambda s: s.bearing), angular=True
    ),
    ErrorVariableDescription(
        key="attitude", name="Attitude", unit="deg", error=_attitude_error, nonnegative=True
    ),
    ErrorVariableDescription(
        key="horizontal_position",
        name="Horizontal position",
        unit="m",
        error=_horizontal_position_error,
        nonnegative=True,
    ),
    ErrorVariableDescription(
        key="ground_speed",
        name="Ground speed",
        unit="m/s",
        error=_ground_speed_error,
        nonnegative=True,
    ),
]

ERROR_VARIABLE_KEYS = {description.key: description for description in ERROR_VARIABLES}


@dataclass(frozen=True)
class ErrorSeries:
    """Error of one variable at every navigation epoch of one run."""

    variable: str
    values: np.ndarray
    angular: bool = False

    def __len__(self) -> int:
        """Return the number of epochs."""
        return len(self.values)


def error_series(
    estimates: Sequence[EstimatedState],
    truths: Sequence[EstimatedState],
    variable: ErrorVariableDescription | str,
) -> ErrorSeries:
    """Return the error series of a variable over paired estimate and truth records."""
    if isinstance(variable, str):
        variable = ERROR_VARIABLE_KEYS[variable]
    if len(estimates) != len(truths):
        raise MetricsError(
            f"Estimate and truth records differ in length: {len(estimates)} vs {len(truths)}"
        )
    values = np.fromiter(
        (variable.error(estimate, truth) for estimate, truth in zip(estimates, truths)),
        dtype=float,
        count=len(estimates),
    )
    return ErrorSeries(variable.key, values, variable.angular)


@dataclass(frozen=True)
class TrajectoryMetrics:
    """Mean, population standard deviation and signed maximum of one run."""

    mean: float
    std: float
    max: float


def signed_max(values: np.ndarray) -> float:
    """Return the value of largest magnitude, keeping its sign; first one on ties."""
    return float(values[int(np.argmax(np.abs(values)))])


def trajectory_metrics(series: ErrorSeries | np.ndarray) -> TrajectoryMetrics:
    """Return the trajectory metrics of one error series."""
    values = series.values if isinstance(series, ErrorSeries) else np.asarray(series, dtype=float)
    if values.size == 0:
        raise MetricsError("Empty error series")
    return TrajectoryMetrics(float(np.mean(values)), float(np.std(values)), signed_max(values))


@dataclass(frozen=True, kw_only=True)
class AggregatedMetrics:
    """Mean, standard deviation and maximum across runs of the per-run μ, σ and |max|."""

    mean_mean: float
    std_mean: float
    max_mean: float
    mean_std: float
    std_std: float
    max_std: float
    mean_max: float
    std_max: float
    max_max: float


def aggregate(metrics: Sequence[TrajectoryMetrics]) -> AggregatedMetrics:
    """Aggregate per-run metrics; maximums enter as absolute values."""
    if not metrics:
        raise MetricsError("No runs to aggregate")
    means = np.array([m.mean for m in metrics])
    stds = np.array([m.std for m in metrics])
    maxes = np.abs(np.array([m.max for m in metrics]))
    return AggregatedMetrics(
        mean_mean=float(np.mean(means)),
        std_mean=float(np.std(means)),
        max_mean=float(np.max(np.abs(means))),
        mean_std=float(np.mean(stds)),
        std_std=float(np.std(stds)),
        max_std=float(np.max(stds)),
        mean_max=float(np.mean(maxes)),
        std_max=float(np.std(maxes)),
        max_max=float(np.max(maxes)),
    )


@dataclass(frozen=True)
class FinalStateMetrics:
    """Mean, standard deviation and maximum magnitude of the final errors."""

    mean: float
    std: float
    max: float


def aggregate_final_state(values: Sequence[float] | np.ndarray) -> FinalStateMetrics:
    """Aggregate the final error of every run."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise MetricsError("No runs to aggregate")
    return FinalStateMetrics(
        float(np.mean(values)), float(np.std(values)), float(np.max(np.abs(values)))
    )


@dataclass(frozen=True)
class TimeAggregatedMetrics:
    """Mean and population standard deviation across runs at every epoch."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def rms(self) -> np.ndarray:
        """Return the cross-run root mean square at every epoch."""
        return np.sqrt(self.mean**2 + self.std**2)


def time_aggregate(series: Sequence[ErrorSeries | np.ndarray]) -> TimeAggregatedMetrics:
    """Aggregate across runs epoch by epoch; every run must share the epoch grid."""
    if not series:
        raise MetricsError("No runs to aggregate")
    arrays = [s.values if isinstance(s, ErrorSeries) else np.asarray(s) for s in series]
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise MetricsError(f"Error series of different lengths: {sorted(lengths)}")
    stacked = np.vstack(arrays)
    return TimeAggregatedMetrics(np.mean(stacked, axis=0), np.std(stacked, axis=0))


class TimeAggregator:
    """Streaming epoch-wise mean and variance (Welford), fed in run order."""

    def __init__(self) -> None:
        """Initialize empty."""
        self.count = 0
        self._mean: np.ndarray | None = None
        self._m2: np.ndarray | None = None

    def add(self, values: np.ndarray) -> None:
        """Fold in the series of one more run."""
        values = np.asarray(values, dtype=float)
        if self._mean is None:
            self._mean = np.zeros_like(values)
            self._m2 = np.zeros_like(values)
        elif values.shape != self._mean.shape:
            raise MetricsError(
                f"Error series of different lengths: {len(self._mean)} vs {len(values)}"
            )
        self.count += 1
        delta = values - self._mean
        self._mean = self._mean + delta / self.count
        self._m2 = self._m2 + delta * (values - self._mean)

    def result(self) -> TimeAggregatedMetrics:
        """Return the metrics of the runs folded so far."""
        if self._mean is None or self._m2 is None:
            raise MetricsError("No runs to aggregate")
        return TimeAggregatedMetrics(
            self._mean.copy(), np.sqrt(np.maximum(self._m2 / self.count, 0.0))
        )


@dataclass(frozen=True)
class Classification:
    """Drift and bias verdict with the numbers behind it."""

    drift: bool
    biased: bool
    growth: float
    ratios: dict[str, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        """Return e.g. ``bounded, unbiased``."""
        return f"{'drift' if self.drift else 'bounded'}, {'biased' if self.biased else 'unbiased'}"


def _ratio(numerator: float, denominator: float) -> float:
    if numerator == 0.0:
        return 0.0
    if denominator == 0.0:
        return math.inf
    return numerator / denominator


def relative_growth(times: np.ndarray, rms: np.ndarray) -> float:
    """Return the growth over the final half of a run relative to its mean level there.

    The growth is the least-squares slope times the length of the final half.
    """
    half = len(rms) // 2
    times = np.asarray(times, dtype=float)[half:]
    level = np.asarray(rms, dtype=float)[half:]
    mean_level = float(np.mean(level))
    if len(level) < 2 or mean_level == 0.0:
        return 0.0
    slope = float(np.polyfit(times, level, 1)[0])
    return slope * float(times[-1] - times[0]) / mean_level


def classify(
    aggregated: AggregatedMetrics,
    final_state: FinalStateMetrics,
    time_aggregated: TimeAggregatedMetrics,
    times: np.ndarray,
    nonnegative: bool = False,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
    drift_threshold: float = DEFAULT_DRIFT_THRESHOLD,
) -> Classification:
    """Classify an error variable as bounded or drifting, biased or unbiased."""
    growth = relative_growth(times, time_aggregated.rms)
    drift = growth > drift_threshold
    mean_mean = abs(aggregated.mean_mean)
    final_mean = abs(final_state.mean)
    ratios = {
        "mean_over_std": _ratio(mean_mean, aggregated.mean_std),
        "mean_over_max": _ratio(mean_mean, aggregated.mean_max),
        "final_mean_over_std": _ratio(final_mean, final_state.std),
        "final_mean_over_max": _ratio(final_mean, final_state.max),
    }
    if nonnegative:
        biased = aggregated.max_max > 0.0
    elif drift:
        biased = not (
            ratios["final_mean_over_std"] < ratio_threshold
            and ratios["final_mean_over_max"] < ratio_threshold
        )
    else:
        biased = not (
            ratios["mean_over_std"] < ratio_threshold
            and ratios["mean_over_max"] < ratio_threshold
        )
    return Classification(drift=drift, biased=biased, growth=growth, ratios=ratios)


@dataclass(frozen=True)
class VariableReport:
    """Every metric of one error variable over a batch."""

    variable: str
    trajectory: tuple[TrajectoryMetrics, ...]
    final_values: tuple[float, ...]
    aggregated: AggregatedMetrics
    final_state: FinalStateMetrics
    time_aggregated: TimeAggregatedMetrics
    classification: Classification


@dataclass(frozen=True)
class MetricsReport:
    """Batch report: per-variable metrics plus the runs they cover."""

    runs: tuple[int, ...]
    failed_runs: tuple[int, ...]
    times: np.ndarray
    variables: dict[str, VariableReport]


def build_variable_report(
    variable: str,
    trajectory: Sequence[TrajectoryMetrics],
    final_values: Sequence[float],
    time_aggregated: TimeAggregatedMetrics,
    times: np.ndarray,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
    drift_threshold: float = DEFAULT_DRIFT_THRESHOLD,
) -> VariableReport:
    """Reduce the per-run metrics of one variable into its report."""
    aggregated = aggregate(trajectory)
    final_state = aggregate_final_state(final_values)
    classification = classify(
        aggregated,
        final_state,
        time_aggregated,
        times,
        nonnegative=ERROR_VARIABLE_KEYS[variable].nonnegative,
        ratio_threshold=ratio_threshold,
        drift_threshold=drift_threshold,
    )
    return VariableReport(
        variable=variable,
        trajectory=tuple(trajectory),
        final_values=tuple(final_values),
        aggregated=aggregated,
        final_state=final_state,
        time_aggregated=time_aggregated,
        classification=classification,
    )


def format_report(report: MetricsReport) -> str:
    """Return a human-readable table of a report."""
    header = (
        f"{'variable':<20} {'unit':<5} {'mean(mu)':>11} {'std(mu)':>11} {'mean(sig)':>11}"
        f" {'mean(max)':>11} {'max(max)':>11} {'mu_END':>11} {'sig_END':>11}  verdict"
    )
    lines = [
        f"runs: {len(report.runs)} (failed: {', '.join(map(str, report.failed_runs)) or 'none'})",
        header,
        "-" * len(header),
    ]
    for key, entry in report.variables.items():
        a = entry.aggregated
        f = entry.final_state
        lines.append(
            f"{key:<20} {ERROR_VARIABLE_KEYS[key].unit:<5} {a.mean_mean:>11.4g}"
            f" {a.std_mean:>11.4g} {a.mean_std:>11.4g} {a.mean_max:>11.4g}"
            f" {a.max_max:>11.4g} {f.mean:>11.4g} {f.std:>11.4g}  {entry.classification.label}"
        )
    return "\n".join(lines)
