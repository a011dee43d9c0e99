"""Single runs and Monte Carlo batches.

A run interleaves, within every 0.02 s control frame, ten truth steps,
sensing and navigation every fifth truth step, GNSS every second, camera
poses at 10 Hz, then one guidance and control update. Runs share nothing,
so a batch farms them out to a process pool and folds the results back in
run index order.
"""

from __future__ import annotations

import asyncio
from collections.abc import Callable
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
import contextlib
from dataclasses import dataclass, field, replace
import logging
import math
from pathlib import Path

import numpy as np

from .airframe import Airframe, ControlInputs
from .atmosphere import geopotential_from_pressure_altitude
from .camera import CameraRig
from .config import RunConfig
from .const import (
    CONTROL_STEP,
    SENSED_STEP,
    TRUTH_PER_CAMERA,
    TRUTH_PER_CONTROL,
    TRUTH_PER_GNSS,
    TRUTH_PER_SENSED,
    TRUTH_STEP,
)
from .control import Controller
from .earth import EarthModel, MagneticModel, apply_geo_perturbation, geodetic_from_geopotential
from .exceptions import (
    ConstraintError,
    DivergenceError,
    EnvelopeError,
    MetricsError,
    NavigationError,
    PlanError,
)
from .flight import FlightEnvironment, FlightKernel, FlightObservables, TruthState, level_state
from .guidance import Guidance
from .metrics import (
    ERROR_VARIABLES,
    MetricsReport,
    TimeAggregator,
    TrajectoryMetrics,
    build_variable_report,
    trajectory_metrics,
)
from .navigation import (
    EstimatedState,
    NavigationSystem,
    TruthSample,
    create_navigation,
    estimate_from_truth,
)
from .scenarios import TERRAIN_ZONES, Scenario, build_mission_plan, sample_scenario
from .seedtree import TrajectorySeedSet, derive_run_seeds
from .sensors import SensedRecord, SensorSuite, fine_alignment, initialize_sensor_errors
from .traces import (
    CAMERA_COLUMNS,
    CAMERA_FILE,
    CONTROL_COLUMNS,
    CONTROL_FILE,
    ESTIMATE_COLUMNS,
    ESTIMATED_FILE,
    FAILURE_FILE,
    SCENARIO_FILE,
    SENSED_COLUMNS,
    SENSED_FILE,
    TRUTH_COLUMNS,
    TRUTH_FILE,
    TRUTH_NAV_FILE,
    TraceWriter,
    estimate_from_row,
    estimate_row,
    provenance,
    read_trace,
    sensed_row,
    write_key_values,
    write_report,
)
from .wind import DrydenTurbulence

_LOGGER = logging.getLogger(__name__)

# Errors that end one run without ending the batch.
RUN_FAILURES = (DivergenceError, EnvelopeError, PlanError, NavigationError, ConstraintError)


def run_directory(output_dir: Path, run_index: int) -> Path:
    """Return the output directory of one run."""
    return output_dir / f"run_{run_index:04d}"


@dataclass
class RunArtifacts:
    """Outcome of one run: where its traces are and its per-variable errors."""

    run_index: int
    trajectory_seed: int
    directory: Path
    failed: bool = False
    failure: str | None = None
    scenario: Scenario | None = None
    truth_epochs: int = 0
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    errors: dict[str, np.ndarray] = field(default_factory=dict)
    trajectory: dict[str, TrajectoryMetrics] = field(default_factory=dict)

    @property
    def estimate_epochs(self) -> int:
        """Return the number of navigation epochs."""
        return len(self.times)


class RunSimulation:
    """Closed-loop simulation of one run."""

    def __init__(self, config: RunConfig, seeds: TrajectorySeedSet) -> None:
        """Materialize the scenario, environment, sensors and the initial state."""
        self.config = config
        self.seeds = seeds
        self.t = 0.0
        zone = TERRAIN_ZONES[config.zone]
        self.scenario = sample_scenario(
            config.scenario,
            seeds.sampler("MISSION"),
            seeds.sampler("WEATHER"),
            seeds.sampler("WIND"),
            config.wind_end_reference,
            config.gnss_denied_time,
        )
        self.end_time = config.duration if config.duration is not None else self.scenario.end_time
        mission = self.scenario.mission
        weather = self.scenario.weather.weather_profile()
        temperature_offset, pressure_offset = weather.offsets(0.0)
        altitude = geodetic_from_geopotential(
            geopotential_from_pressure_altitude(
                mission.pressure_altitude_initial, temperature_offset, pressure_offset
            )
        )
        origin = zone.position(altitude)

        self.earth = EarthModel(
            MagneticModel(origin, math.radians(zone.declination)),
            apply_geo_perturbation(
                seeds.sampler("GEO"),
                config.gravity_std_horizontal,
                config.gravity_std_vertical,
                config.magnetic_std,
            ),
        )
        turbulence = None
        if config.turbulence_severity != "none":
            turbulence = DrydenTurbulence(seeds.sampler("TURB"), config.turbulence_severity)
        self.environment = FlightEnvironment(
            self.earth,
            self.scenario.weather.wind_profile(),
            weather,
            turbulence,
            zone.ground_altitude,
        )
        self.airframe = Airframe(config.airframe)
        self.kernel = FlightKernel(self.airframe, self.environment, config.integrator)

        fuel = config.airframe.fuel_capacity
        self.trim = self.airframe.trim(
            mission.airspeed_initial,
            self.environment.atmosphere(0.0, origin),
            fuel,
            gravity=float(np.linalg.norm(self.environment.gravity(origin))),
        )
        self.state = level_state(
            origin,
            self.trim.airspeed,
            self.trim.alpha,
            self.trim.beta,
            math.radians(mission.bearing_initial),
            self.trim.pitch,
            self.airframe.full_mass,
            wind_ned=self.environment.wind_ned(0.0, origin),
        )
        self.controls = self.trim.controls
        self.suite = SensorSuite(
            initialize_sensor_errors(config.sensors, seeds, config.gnss_denied_time)
        )
        self.camera = CameraRig(config.sensors.camera, seeds.sampler("CAM"))
        self.guidance = Guidance(build_mission_plan(self.scenario))
        self.navigation: NavigationSystem | None = None
        self.controller: Controller | None = None
        self._airspeed = self.trim.airspeed

    def _sense(self, t: float, observables: FlightObservables, gnss_due: bool) -> SensedRecord:
        state = self.state
        mass = self.airframe.mass_properties(state.mass - self.airframe.dry_mass)
        specific_force, angular_rate = self.suite.sense_imu(
            observables.specific_force,
            state.angular_rate,
            observables.angular_acceleration,
            mass.cg,
        )
        field_body = state.body_to_ned.T @ self.earth.magnetic_field(state.position)
        atmosphere = observables.atmosphere
        wrench = observables.wrench
        pressure, temperature, airspeed, alpha, beta = self.suite.sense_airdata(
            atmosphere.pressure, atmosphere.temperature, wrench.airspeed, wrench.alpha, wrench.beta
        )
        gnss = None
        if gnss_due:
            gnss = self.suite.sense_gnss(t, state.position, state.velocity_ned)
        return SensedRecord(
            t=t,
            specific_force=specific_force,
            angular_rate=angular_rate,
            magnetic_field=self.suite.sense_magnetometer(field_body),
            pressure=pressure,
            temperature=temperature,
            airspeed=airspeed,
            alpha=alpha,
            beta=beta,
            gnss=gnss,
        )

    def _navigate(
        self, t: float, gnss_due: bool
    ) -> tuple[SensedRecord, EstimatedState, EstimatedState]:
        observables = self.kernel.observe(self.state, t, self.controls)
        self._airspeed = observables.wrench.airspeed
        record = self._sense(t, observables, gnss_due)
        sample = TruthSample(t, self.state, observables)
        if self.navigation is None:
            errors = self.suite.errors
            initial = fine_alignment(
                self.state.position,
                self.state.velocity_ned,
                self.state.attitude,
                errors,
                self.config.sensors.alignment,
                self.seeds.sampler("ALIGN"),
                record.gnss,
            )
            self.navigation = create_navigation(
                self.config.navigation, initial, self.earth.onboard()
            )
        truth = sample if self.navigation.requires_truth else None
        return record, self.navigation.step(record, truth), estimate_from_truth(sample)

    def run(
        self,
        on_truth: Callable[[float, TruthState], None],
        on_navigation: Callable[[SensedRecord, EstimatedState, EstimatedState], None],
        on_control: Callable[[float, int, ControlInputs], None],
        on_camera: Callable[[float, TruthState], None],
    ) -> None:
        """Fly the scenario to its end time, reporting every epoch to the callbacks."""
        frames = round(self.end_time / CONTROL_STEP)
        on_truth(0.0, self.state)
        on_camera(0.0, self.state)
        record, estimate, truth = self._navigate(0.0, gnss_due=True)
        on_navigation(record, estimate, truth)
        self.controller = Controller(self.config.gains, self.trim, estimate)
        self.controls = self.controller.step(self.guidance.step(estimate, 0.0), estimate)
        on_control(0.0, self.guidance.index, self.controls)

        step = 0
        for _ in range(frames):
            for _ in range(TRUTH_PER_CONTROL):
                self.t = step * TRUTH_STEP
                self.state = self.kernel.step(self.state, self.t, self.controls)
                self.environment.advance_turbulence(TRUTH_STEP, self._airspeed, self.state.altitude)
                step += 1
                self.t = step * TRUTH_STEP
                on_truth(self.t, self.state)
                if step % TRUTH_PER_SENSED == 0:
                    record, estimate, truth = self._navigate(
                        self.t, gnss_due=step % TRUTH_PER_GNSS == 0
                    )
                    on_navigation(record, estimate, truth)
                if step % TRUTH_PER_CAMERA == 0:
                    on_camera(self.t, self.state)
            target = self.guidance.step(estimate, self.t)
            self.controls = self.controller.step(target, estimate)
            on_control(self.t, self.guidance.index, self.controls)
        _LOGGER.debug(
            "Run %d finished at t=%.2f s on target %d",
            self.seeds.run_index,
            self.t,
            self.guidance.index + 1,
        )


def _failure_record(
    simulation: RunSimulation | None, seeds: TrajectorySeedSet, exception: Exception
) -> dict[str, object]:
    record: dict[str, object] = {
        "run_index": seeds.run_index,
        "trajectory_seed": seeds.trajectory_seed,
        "error": type(exception).__name__,
        "message": str(exception),
        "time": simulation.t if simulation is not None else 0.0,
    }
    if isinstance(exception, DivergenceError):
        if not math.isnan(exception.time):
            record["time"] = exception.time
        if exception.component is not None:
            record["component"] = exception.component
    return record


def run_single(config: RunConfig, run_index: int) -> RunArtifacts:
    """Simulate run ``run_index`` of a batch and write its traces.

    A run that diverges, leaves the envelope, has a bad plan or a failing
    navigation system leaves a failure record and comes back flagged.
    """
    seeds = derive_run_seeds(config.master_seed, config.run_count, run_index)
    directory = run_directory(config.output_dir, run_index)
    header = provenance(config.master_seed, run_index, config.config_hash)
    artifacts = RunArtifacts(run_index, seeds.trajectory_seed, directory)
    times: list[float] = []
    errors: dict[str, list[float]] = {variable.key: [] for variable in ERROR_VARIABLES}
    simulation: RunSimulation | None = None

    with contextlib.ExitStack() as stack:

        def writer(name: str, columns: tuple[str, ...]) -> TraceWriter | None:
            if not config.write_traces:
                return None
            return stack.enter_context(TraceWriter(directory / name, columns, header))

        try:
            simulation = RunSimulation(config, seeds)
            artifacts.scenario = simulation.scenario
            if config.write_traces:
                write_key_values(
                    directory / SCENARIO_FILE,
                    {
                        "run_index": run_index,
                        "trajectory_seed": seeds.trajectory_seed,
                        "zone": config.zone,
                        **simulation.scenario.as_dict(),
                    },
                    header,
                )
            truth_writer = writer(TRUTH_FILE, TRUTH_COLUMNS)
            sensed_writer = writer(SENSED_FILE, SENSED_COLUMNS)
            estimate_columns = tuple(d.key for d in ESTIMATE_COLUMNS)
            estimated_writer = writer(ESTIMATED_FILE, estimate_columns)
            truth_nav_writer = writer(TRUTH_NAV_FILE, estimate_columns)
            control_writer = writer(CONTROL_FILE, CONTROL_COLUMNS)
            camera_writer = writer(CAMERA_FILE, CAMERA_COLUMNS)
            truth_steps = 0

            def on_truth(t: float, state: TruthState) -> None:
                nonlocal truth_steps
                if truth_writer is not None and truth_steps % config.truth_stride == 0:
                    truth_writer.write([t, *state.as_vector()])
                truth_steps += 1

            def on_navigation(
                record: SensedRecord, estimate: EstimatedState, truth: EstimatedState
            ) -> None:
                times.append(record.t)
                for variable in ERROR_VARIABLES:
                    errors[variable.key].append(variable.error(estimate, truth))
                if sensed_writer is not None:
                    sensed_writer.write(sensed_row(record))
                    estimated_writer.write(estimate_row(estimate))
                    truth_nav_writer.write(estimate_row(truth))

            def on_control(t: float, target_index: int, controls: ControlInputs) -> None:
                if control_writer is None:
                    return
                target = simulation.guidance.plan[target_index]
                control_writer.write(
                    [
                        t,
                        target_index + 1,
                        target.throttle.value,
                        target.elevator.value,
                        target.aileron.value,
                        target.rudder.value,
                        simulation.controller.pitch_setpoint,
                        simulation.controller.bank_setpoint,
                        *controls.as_tuple(),
                    ]
                )

            def on_camera(t: float, state: TruthState) -> None:
                if camera_writer is not None:
                    camera_writer.write(simulation.camera.pose(t, state).as_row())

            simulation.run(on_truth, on_navigation, on_control, on_camera)
            artifacts.truth_epochs = truth_steps
        except RUN_FAILURES as exception:
            record = _failure_record(simulation, seeds, exception)
            write_key_values(directory / FAILURE_FILE, record, header)
            _LOGGER.warning(
                "Run %d failed at t=%.3f s and is excluded: %s",
                run_index,
                record["time"],
                exception,
            )
            artifacts.failed = True
            artifacts.failure = str(exception)
            return artifacts

    artifacts.times = np.array(times)
    artifacts.errors = {key: np.array(values) for key, values in errors.items()}
    artifacts.trajectory = {
        key: trajectory_metrics(values) for key, values in artifacts.errors.items()
    }
    return artifacts


class _ReportBuilder:
    """Ordered reduction of run artifacts into a metrics report."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.runs: list[int] = []
        self.failed: list[int] = []
        self.times: np.ndarray | None = None
        self.trajectory: dict[str, list[TrajectoryMetrics]] = {
            v.key: [] for v in ERROR_VARIABLES
        }
        self.final_values: dict[str, list[float]] = {v.key: [] for v in ERROR_VARIABLES}
        self.aggregators = {v.key: TimeAggregator() for v in ERROR_VARIABLES}

    def add(self, artifacts: RunArtifacts) -> None:
        if artifacts.failed:
            self.failed.append(artifacts.run_index)
            return
        if self.times is None:
            self.times = artifacts.times
        elif len(self.times) != len(artifacts.times):
            raise MetricsError(
                f"Run {artifacts.run_index} has {len(artifacts.times)} epochs,"
                f" expected {len(self.times)}"
            )
        self.runs.append(artifacts.run_index)
        for key, values in artifacts.errors.items():
            self.trajectory[key].append(trajectory_metrics(values))
            self.final_values[key].append(float(values[-1]))
            self.aggregators[key].add(values)

    def report(self) -> MetricsReport:
        if self.times is None:
            raise MetricsError(f"All {len(self.failed)} runs failed")
        return MetricsReport(
            runs=tuple(self.runs),
            failed_runs=tuple(self.failed),
            times=self.times,
            variables={
                key: build_variable_report(
                    key,
                    self.trajectory[key],
                    self.final_values[key],
                    self.aggregators[key].result(),
                    self.times,
                    self.config.ratio_threshold,
                    self.config.drift_threshold,
                )
                for key in self.trajectory
            },
        )


@dataclass(frozen=True)
class BatchResult:
    """Report of a batch plus the per-run outcomes, error series dropped."""

    report: MetricsReport
    runs: tuple[RunArtifacts, ...]


def _executor(parallelism: int) -> Executor:
    if parallelism == 1:
        return ThreadPoolExecutor(max_workers=1)
    return ProcessPoolExecutor(max_workers=parallelism)


async def async_run_monte_carlo(config: RunConfig) -> BatchResult:
    """Run every seed of a batch and reduce the results in run index order."""
    loop = asyncio.get_running_loop()
    builder = _ReportBuilder(config)
    finished: dict[int, RunArtifacts] = {}
    kept: list[RunArtifacts] = []
    next_index = 1
    _LOGGER.debug(
        "Starting %d runs of scenario %d in zone %s, parallelism %d",
        config.run_count,
        config.scenario,
        config.zone,
        config.parallelism,
    )
    with _executor(config.parallelism) as executor:
        futures = [
            loop.run_in_executor(executor, run_single, config, index)
            for index in range(1, config.run_count + 1)
        ]
        try:
            for future in asyncio.as_completed(futures):
                artifacts = await future
                finished[artifacts.run_index] = artifacts
                while next_index in finished:
                    done = finished.pop(next_index)
                    builder.add(done)
                    kept.append(replace(done, errors={}))
                    next_index += 1
        except Exception:
            _LOGGER.exception("Batch aborted after %d runs", next_index - 1)
            for future in futures:
                future.cancel()
            raise
    report = builder.report()
    if config.write_traces:
        write_report(
            report, config.output_dir, provenance(config.master_seed, None, config.config_hash)
        )
    if report.failed_runs:
        _LOGGER.warning(
            "%d of %d runs failed: %s",
            len(report.failed_runs),
            config.run_count,
            ", ".join(map(str, report.failed_runs)),
        )
    return BatchResult(report, tuple(kept))


def run_monte_carlo(config: RunConfig) -> BatchResult:
    """Run a batch to completion."""
    return asyncio.run(async_run_monte_carlo(config))


def run_zone_sweep(config: RunConfig) -> dict[str, BatchResult]:
    """Run the batch once per listed terrain zone, each into its own subdirectory."""
    zones = config.zones or (config.zone,)
    return {zone: run_monte_carlo(config.with_zone(zone)) for zone in zones}


def report_from_traces(config: RunConfig, output_dir: Path | None = None) -> MetricsReport:
    """Recompute the batch report from the estimated and truth traces on disk."""
    output_dir = output_dir or config.output_dir
    builder = _ReportBuilder(config)
    for run_index in range(1, config.run_count + 1):
        directory = run_directory(output_dir, run_index)
        if (directory / FAILURE_FILE).exists():
            builder.add(RunArtifacts(run_index, 0, directory, failed=True))
            continue
        estimated = read_trace(directory / ESTIMATED_FILE)
        truth = read_trace(directory / TRUTH_NAV_FILE)
        if len(estimated.data) != len(truth.data):
            raise MetricsError(f"Run {run_index}: estimated and truth traces differ in length")
        estimates = [estimate_from_row(row) for row in estimated.data]
        truths = [estimate_from_row(row) for row in truth.data]
        errors = {
            variable.key: np.array(
                [variable.error(e, t) for e, t in zip(estimates, truths, strict=True)]
            )
            for variable in ERROR_VARIABLES
        }
        builder.add(
            RunArtifacts(
                run_index,
                0,
                directory,
                times=estimated.column("t"),
                errors=errors,
            )
        )
    return builder.report()


def navigation_epochs(end_time: float) -> int:
    """Return the number of navigation epochs of a run, t=0 included."""
    return round(end_time / SENSED_STEP) + 1


def truth_epochs(end_time: float) -> int:
    """Return the number of truth epochs of a run, t=0 included."""
    return round(end_time / TRUTH_STEP) + 1
