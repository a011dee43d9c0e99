"""Columnar trace files.

Every trace is a whitespace-separated text table. The file starts with
``#`` header lines: the provenance (master seed, run index, config hash)
as ``# key = value`` pairs, then ``# columns: ...`` naming the columns in
order. Floats are written with ``%.17g`` so they read back bit-exactly.

Angles are radians and positions are geodetic longitude and latitude in
radians plus altitude in meters, except in the camera pose file which
uses degrees as external renderers expect.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
import logging
import math
from pathlib import Path
from types import TracebackType
from typing import Self

import numpy as np

from .camera import POSE_COLUMNS
from .earth import GeodeticPosition
from .exceptions import ConfigError
from .flight import STATE_COMPONENTS
from .metrics import ERROR_VARIABLE_KEYS, MetricsReport, format_report
from .navigation import EstimatedState
from .seedtree import TrajectorySeedSet
from .sensors import SensedRecord

_LOGGER = logging.getLogger(__name__)

_FLOAT_FORMAT = "%.17g"
_CHUNK_ROWS = 5000
_COLUMNS_PREFIX = "columns:"

TRUTH_FILE = "truth.txt"
SENSED_FILE = "sensed.txt"
ESTIMATED_FILE = "estimated.txt"
TRUTH_NAV_FILE = "truth_nav.txt"
CONTROL_FILE = "control.txt"
CAMERA_FILE = "camera.txt"
SCENARIO_FILE = "scenario.cfg"
FAILURE_FILE = "failure.cfg"
SEEDS_FILE = "seeds.txt"
REPORT_FILE = "report.txt"
METRICS_FILE = "metrics.txt"


@dataclass(frozen=True, kw_only=True)
class EstimateColumnDescription:
    """Describes one column of an estimated-trajectory trace."""

    key: str
    unit: str
    get_value: Callable[[EstimatedState], float]


ESTIMATE_COLUMNS: list[EstimateColumnDescription] = [
    EstimateColumnDescription(key="t", unit="s", get_value=lambda s: s.t),
    EstimateColumnDescription(
        key="longitude", unit="rad", get_value=lambda s: s.position.longitude
    ),
    EstimateColumnDescription(
        key="latitude", unit="rad", get_value=lambda s: s.position.latitude
    ),
    EstimateColumnDescription(
        key="altitude", unit="m", get_value=lambda s: s.position.altitude
    ),
    *(
        EstimateColumnDescription(
            key=f"v_{axis}", unit="m/s", get_value=lambda s, i=i: s.velocity_ned[i]
        )
        for i, axis in enumerate("NED")
    ),
    *(
        EstimateColumnDescription(
            key=f"q{i}", unit="-", get_value=lambda s, i=i: s.attitude[i]
        )
        for i in range(4)
    ),
    *(
        EstimateColumnDescription(
            key=f"w_{axis}", unit="rad/s", get_value=lambda s, i=i: s.angular_rate[i]
        )
        for i, axis in enumerate("xyz")
    ),
    EstimateColumnDescription(key="vtas", unit="m/s", get_value=lambda s: s.airspeed),
    EstimateColumnDescription(key="alpha", unit="rad", get_value=lambda s: s.alpha),
    EstimateColumnDescription(key="beta", unit="rad", get_value=lambda s: s.beta),
    EstimateColumnDescription(
        key="Hp", unit="m", get_value=lambda s: s.pressure_altitude
    ),
    EstimateColumnDescription(key="T", unit="K", get_value=lambda s: s.temperature),
]

SENSED_COLUMNS = (
    "t",
    "f_x",
    "f_y",
    "f_z",
    "w_x",
    "w_y",
    "w_z",
    "B_x",
    "B_y",
    "B_z",
    "p",
    "T",
    "vtas",
    "alpha",
    "beta",
    "gnss_valid",
    "gnss_longitude",
    "gnss_latitude",
    "gnss_altitude",
    "gnss_v_N",
    "gnss_v_E",
    "gnss_v_D",
)

CONTROL_COLUMNS = (
    "t",
    "target",
    "target_airspeed",
    "target_elevator",
    "target_aileron",
    "target_sideslip",
    "pitch_setpoint",
    "bank_setpoint",
    "throttle",
    "elevator",
    "aileron",
    "rudder",
)

TRUTH_COLUMNS = ("t", *STATE_COMPONENTS)
CAMERA_COLUMNS = POSE_COLUMNS


def estimate_row(estimate: EstimatedState) -> list[float]:
    """Return an estimate in the column order of ``ESTIMATE_COLUMNS``."""
    return [description.get_value(estimate) for description in ESTIMATE_COLUMNS]


def estimate_from_row(row: Sequence[float]) -> EstimatedState:
    """Rebuild an estimate from one trace row."""
    values = dict(zip((d.key for d in ESTIMATE_COLUMNS), row, strict=True))
    return EstimatedState(
        t=float(values["t"]),
        position=GeodeticPosition(
            float(values["longitude"]), float(values["latitude"]), float(values["altitude"])
        ),
        velocity_ned=np.array([values["v_N"], values["v_E"], values["v_D"]], dtype=float),
        attitude=np.array([values[f"q{i}"] for i in range(4)], dtype=float),
        angular_rate=np.array([values["w_x"], values["w_y"], values["w_z"]], dtype=float),
        airspeed=float(values["vtas"]),
        alpha=float(values["alpha"]),
        beta=float(values["beta"]),
        pressure_altitude=float(values["Hp"]),
        temperature=float(values["T"]),
    )


def sensed_row(record: SensedRecord) -> list[float]:
    """Return a sensed record in the column order of ``SENSED_COLUMNS``."""
    if record.gnss is None:
        gnss = [0.0, *([math.nan] * 6)]
    else:
        position = record.gnss.position
        gnss = [
            1.0,
            position.longitude,
            position.latitude,
            position.altitude,
            *record.gnss.velocity_ned,
        ]
    return [
        record.t,
        *record.specific_force,
        *record.angular_rate,
        *record.magnetic_field,
        record.pressure,
        record.temperature,
        record.airspeed,
        record.alpha,
        record.beta,
        *gnss,
    ]


def provenance(master_seed: int, run_index: int | None, config_hash: str) -> dict[str, str]:
    """Return the provenance header every output file carries."""
    header = {"master_seed": str(master_seed), "config_hash": config_hash}
    if run_index is not None:
        header["run_index"] = str(run_index)
    return header


def _header_lines(header: Mapping[str, str], columns: Sequence[str] | None) -> str:
    lines = [f"# {key} = {value}" for key, value in header.items()]
    if columns is not None:
        lines.append(f"# {_COLUMNS_PREFIX} {' '.join(columns)}")
    return "\n".join(lines) + "\n"


class TraceWriter:
    """Buffered writer of one columnar trace."""

    def __init__(
        self,
        path: Path,
        columns: Sequence[str],
        header: Mapping[str, str],
        chunk_rows: int = _CHUNK_ROWS,
    ) -> None:
        """Open the file and write its header."""
        self.path = path
        self.columns = tuple(columns)
        self.rows_written = 0
        self._chunk_rows = chunk_rows
        self._rows: list[Sequence[float]] = []
        path.parent.mkdir(parents=True, exist_ok=True)
        self._file = path.open("w", encoding="utf-8")
        self._file.write(_header_lines(header, self.columns))

    def write(self, row: Sequence[float]) -> None:
        """Queue one row."""
        if len(row) != len(self.columns):
            raise ValueError(
                f"{self.path.name}: row has {len(row)} values, expected {len(self.columns)}"
            )
        self._rows.append(row)
        if len(self._rows) >= self._chunk_rows:
            self.flush()

    def flush(self) -> None:
        """Write the queued rows."""
        if self._rows:
            np.savetxt(self._file, np.asarray(self._rows, dtype=float), fmt=_FLOAT_FORMAT)
            self.rows_written += len(self._rows)
            self._rows.clear()
        self._file.flush()

    def close(self) -> None:
        """Flush and close."""
        if not self._file.closed:
            self.flush()
            self._file.close()

    def __enter__(self) -> Self:
        """Return self."""
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        traceback: TracebackType | None,
    ) -> None:
        """Close the file."""
        self.close()


@dataclass(frozen=True)
class Trace:
    """A trace read back from disk."""

    header: dict[str, str]
    columns: tuple[str, ...]
    data: np.ndarray

    def column(self, key: str) -> np.ndarray:
        """Return one column by name."""
        return self.data[:, self.columns.index(key)]


def read_trace(path: Path) -> Trace:
    """Read a columnar trace with its header."""
    header: dict[str, str] = {}
    columns: tuple[str, ...] = ()
    try:
        with path.open(encoding="utf-8") as file:
            for line in file:
                if not line.startswith("#"):
                    break
                text = line[1:].strip()
                if text.startswith(_COLUMNS_PREFIX):
                    columns = tuple(text[len(_COLUMNS_PREFIX) :].split())
                elif "=" in text:
                    key, _, value = text.partition("=")
                    header[key.strip()] = value.strip()
        data = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exception:
        raise ConfigError(f"Cannot read trace {path}: {exception}") from exception
    if data.size == 0:
        data = np.empty((0, len(columns)))
    return Trace(header, columns, data)


def write_key_values(path: Path, values: Mapping[str, object], header: Mapping[str, str]) -> None:
    """Write a ``key = value`` record such as a scenario dump or a failure record."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as file:
        file.write(_header_lines(header, None))
        for key, value in values.items():
            file.write(f"{key} = {value}\n")


def write_seed_table(
    path: Path, table: Sequence[TrajectorySeedSet], header: Mapping[str, str]
) -> None:
    """Write the seed table: run index, trajectory seed, then every module seed."""
    names = [name for name, _ in table[0]] if table else []
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as file:
        file.write(_header_lines(header, ["run", "trajectory_seed", *names]))
        for seeds in table:
            values = (seeds.run_index, seeds.trajectory_seed, *seeds.module_seeds)
            file.write(" ".join(str(value) for value in values) + "\n")


_METRICS_COLUMNS = (
    "mean_mean",
    "std_mean",
    "max_mean",
    "mean_std",
    "std_std",
    "max_std",
    "mean_max",
    "std_max",
    "max_max",
    "final_mean",
    "final_std",
    "final_max",
    "growth",
    "mean_over_std",
    "mean_over_max",
    "final_mean_over_std",
    "final_mean_over_max",
    "drift",
    "biased",
)


def write_report(report: MetricsReport, directory: Path, header: Mapping[str, str]) -> None:
    """Write the human-readable table, the columnar metrics and the time-aggregated series."""
    directory.mkdir(parents=True, exist_ok=True)
    (directory / REPORT_FILE).write_text(
        _header_lines(header, None) + format_report(report) + "\n", encoding="utf-8"
    )
    with (directory / METRICS_FILE).open("w", encoding="utf-8") as file:
        file.write(_header_lines(header, ["variable", "unit", *_METRICS_COLUMNS]))
        for key, entry in report.variables.items():
            a = entry.aggregated
            f = entry.final_state
            c = entry.classification
            values = (
                a.mean_mean,
                a.std_mean,
                a.max_mean,
                a.mean_std,
                a.std_std,
                a.max_std,
                a.mean_max,
                a.std_max,
                a.max_max,
                f.mean,
                f.std,
                f.max,
                c.growth,
                c.ratios["mean_over_std"],
                c.ratios["mean_over_max"],
                c.ratios["final_mean_over_std"],
                c.ratios["final_mean_over_max"],
                float(c.drift),
                float(c.biased),
            )
            file.write(
                f"{key} {ERROR_VARIABLE_KEYS[key].unit} "
                + " ".join(_FLOAT_FORMAT % value for value in values)
                + "\n"
            )
    for key, entry in report.variables.items():
        series = entry.time_aggregated
        with TraceWriter(
            directory / f"time_{key}.txt", ("t", "mean", "std"), header
        ) as writer:
            for row in zip(report.times, series.mean, series.std, strict=True):
                writer.write(row)
    _LOGGER.debug("Report for %d runs written to %s", len(report.runs), directory)
