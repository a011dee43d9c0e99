"""Configuration files of a simulation batch.

All four file kinds share one line-oriented format: ``key = value`` per
line, ``#`` starts a comment, blank lines are ignored and the last
occurrence of a key wins. Vectors are comma or space separated. Values
are SI with angles in radians unless the key says otherwise.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, replace
import hashlib
import logging
import math
from pathlib import Path
from typing import Any

import voluptuous as vol

from .airframe import AeroCoefficients, AirframeDefinition
from .const import (
    CONF_AIRFRAME_FILE,
    CONF_DRIFT_THRESHOLD,
    CONF_DURATION,
    CONF_GAINS_FILE,
    CONF_GNSS_DENIED_TIME,
    CONF_GRAVITY_STD_HORIZONTAL,
    CONF_GRAVITY_STD_VERTICAL,
    CONF_INTEGRATOR,
    CONF_MAGNETIC_STD,
    CONF_MASTER_SEED,
    CONF_NAVIGATION,
    CONF_OUTPUT_DIR,
    CONF_PARALLELISM,
    CONF_RATIO_THRESHOLD,
    CONF_RUN_COUNT,
    CONF_SCENARIO,
    CONF_SENSORS_FILE,
    CONF_TRUTH_STRIDE,
    CONF_TURBULENCE,
    CONF_WIND_END_REFERENCE,
    CONF_WRITE_TRACES,
    CONF_ZONE,
    CONF_ZONES,
    DEFAULT_DRIFT_THRESHOLD,
    DEFAULT_GRAVITY_STD_HORIZONTAL,
    DEFAULT_GRAVITY_STD_VERTICAL,
    DEFAULT_MAGNETIC_STD,
    DEFAULT_MASTER_SEED,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_PARALLELISM,
    DEFAULT_RATIO_THRESHOLD,
    DEFAULT_RUN_COUNT,
    DEFAULT_TURBULENCE,
    DEFAULT_ZONE,
    GNSS_DENIED_TIME,
    INTEGRATOR_SO3,
    INTEGRATORS,
    NAVIGATION_DEAD_RECKONING,
    SCENARIO_1,
    SCENARIOS,
    TURBULENCE_SEVERITIES,
    WIND_END_REFERENCES,
)
from .control import ControlGains, PidGains
from .exceptions import ConfigError
from .navigation import NAVIGATION_SYSTEMS
from .scenarios import TERRAIN_ZONES
from .sensors import (
    AirDataSpec,
    AlignmentSpec,
    CameraSpec,
    ChannelSpec,
    GnssSpec,
    InertialSensorSpec,
    MagnetometerSpec,
    PlatformSpec,
    SensorSpec,
)

_LOGGER = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_RUN_FILE = DATA_DIR / "run.cfg"
DEFAULT_SENSORS_FILE = DATA_DIR / "sensors.cfg"
DEFAULT_AIRFRAME_FILE = DATA_DIR / "airframe.cfg"
DEFAULT_GAINS_FILE = DATA_DIR / "gains.cfg"

# Run keys that do not change any result and stay out of the config hash.
_UNHASHED_KEYS = (
    CONF_OUTPUT_DIR,
    CONF_PARALLELISM,
    CONF_WRITE_TRACES,
    CONF_SENSORS_FILE,
    CONF_AIRFRAME_FILE,
    CONF_GAINS_FILE,
)


def parse_key_values(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines into a dict."""
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        if not separator or not key.strip():
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        values[key.strip()] = value.strip()
    return values


def read_key_values(path: Path) -> dict[str, str]:
    """Read and parse a configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exception:
        raise ConfigError(f"Cannot read {path}: {exception}") from exception
    return parse_key_values(text, str(path))


def vector(size: int) -> Callable[[Any], tuple[float, ...]]:
    """Return a validator for a vector of ``size`` floats."""

    def _validate(value: Any) -> tuple[float, ...]:
        if isinstance(value, (list, tuple)):
            items = list(value)
        else:
            items = str(value).replace(",", " ").split()
        if len(items) != size:
            raise vol.Invalid(f"expected {size} values, got {len(items)}")
        try:
            return tuple(float(item) for item in items)
        except (TypeError, ValueError) as exception:
            raise vol.Invalid(f"not a number in {value!r}") from exception

    return _validate


def _codes(value: Any) -> tuple[str, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).replace(",", " ").split()
    codes = tuple(str(item).upper() for item in items)
    for code in codes:
        if code not in TERRAIN_ZONES:
            raise vol.Invalid(f"unknown terrain zone {code}")
    return codes


_FLOAT = vol.Coerce(float)
_NONNEGATIVE = vol.All(vol.Coerce(float), vol.Range(min=0.0))
_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))
_COUNT = vol.All(vol.Coerce(int), vol.Range(min=1))

RUN_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_MASTER_SEED, default=DEFAULT_MASTER_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_RUN_COUNT, default=DEFAULT_RUN_COUNT): _COUNT,
        vol.Optional(CONF_SCENARIO, default=SCENARIO_1): vol.All(
            vol.Coerce(int), vol.In(SCENARIOS)
        ),
        vol.Optional(CONF_ZONE, default=DEFAULT_ZONE): vol.All(vol.Upper, vol.In(TERRAIN_ZONES)),
        vol.Optional(CONF_ZONES, default=()): _codes,
        vol.Optional(CONF_INTEGRATOR, default=INTEGRATOR_SO3): vol.In(INTEGRATORS),
        vol.Optional(CONF_NAVIGATION, default=NAVIGATION_DEAD_RECKONING): str,
        vol.Optional(CONF_SENSORS_FILE): str,
        vol.Optional(CONF_AIRFRAME_FILE): str,
        vol.Optional(CONF_GAINS_FILE): str,
        vol.Optional(CONF_OUTPUT_DIR, default=DEFAULT_OUTPUT_DIR): str,
        vol.Optional(CONF_PARALLELISM, default=DEFAULT_PARALLELISM): _COUNT,
        vol.Optional(CONF_DURATION): _POSITIVE,
        vol.Optional(CONF_GNSS_DENIED_TIME, default=GNSS_DENIED_TIME): _NONNEGATIVE,
        vol.Optional(CONF_TURBULENCE, default=DEFAULT_TURBULENCE): vol.In(
            TURBULENCE_SEVERITIES
        ),
        vol.Optional(
            CONF_GRAVITY_STD_HORIZONTAL, default=DEFAULT_GRAVITY_STD_HORIZONTAL
        ): _NONNEGATIVE,
        vol.Optional(
            CONF_GRAVITY_STD_VERTICAL, default=DEFAULT_GRAVITY_STD_VERTICAL
        ): _NONNEGATIVE,
        vol.Optional(CONF_MAGNETIC_STD, default=DEFAULT_MAGNETIC_STD): vector(3),
        vol.Optional(CONF_WIND_END_REFERENCE, default="temperature"): vol.In(
            WIND_END_REFERENCES
        ),
        vol.Optional(CONF_TRUTH_STRIDE, default=1): _COUNT,
        vol.Optional(CONF_WRITE_TRACES, default=True): vol.Boolean(),
        vol.Optional(CONF_RATIO_THRESHOLD, default=DEFAULT_RATIO_THRESHOLD): _POSITIVE,
        vol.Optional(CONF_DRIFT_THRESHOLD, default=DEFAULT_DRIFT_THRESHOLD): _POSITIVE,
    }
)


def _inertial_keys(prefix: str) -> dict[vol.Optional, Any]:
    return {
        vol.Optional(f"{prefix}.{name}", default=0.0): _NONNEGATIVE
        for name in ("scale_factor", "cross_coupling", "bias_offset", "bias_walk", "noise_density")
    }


def _channel_keys(prefix: str) -> dict[vol.Optional, Any]:
    return {
        vol.Optional(f"{prefix}.bias", default=0.0): _NONNEGATIVE,
        vol.Optional(f"{prefix}.noise", default=0.0): _NONNEGATIVE,
    }


_AIR_CHANNELS = ("pressure", "temperature", "airspeed", "alpha", "beta")

SENSORS_SCHEMA = vol.Schema(
    {
        **_inertial_keys("imu.accel"),
        **_inertial_keys("imu.gyro"),
        vol.Optional("mag.scale_factor", default=0.0): _NONNEGATIVE,
        vol.Optional("mag.cross_coupling", default=0.0): _NONNEGATIVE,
        vol.Optional("mag.hard_iron", default=0.0): _NONNEGATIVE,
        vol.Optional("mag.noise", default=0.0): _NONNEGATIVE,
        **{
            key: validator
            for channel in _AIR_CHANNELS
            for key, validator in _channel_keys(f"air.{channel}").items()
        },
        vol.Optional("gnss.position_noise", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("gnss.ionospheric_bias", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("gnss.ionospheric_walk", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("gnss.velocity_noise", default=0.0): _NONNEGATIVE,
        vol.Optional("platform.imu_position", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("platform.imu_misalignment", default=0.0): _NONNEGATIVE,
        vol.Optional("platform.lever_arm_knowledge", default=0.0): _NONNEGATIVE,
        vol.Optional("camera.position", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("camera.mounting_deg", default=(0.0, -90.0, 0.0)): vector(3),
        vol.Optional("camera.misalignment", default=0.0): _NONNEGATIVE,
        vol.Optional("camera.mounting_knowledge", default=0.0): _NONNEGATIVE,
        vol.Optional("camera.focal_length", default=800.0): _POSITIVE,
        vol.Optional("camera.width", default=1024): _COUNT,
        vol.Optional("camera.height", default=768): _COUNT,
        vol.Optional("alignment.attitude", default=(0.0, 0.0, 0.0)): vector(3),
        vol.Optional("alignment.accelerometer_bias", default=0.0): _NONNEGATIVE,
        vol.Optional("alignment.gyroscope_bias", default=0.0): _NONNEGATIVE,
        vol.Optional("alignment.hard_iron", default=0.0): _NONNEGATIVE,
    }
)

_AERO_KEYS = tuple(AeroCoefficients.__dataclass_fields__)

AIRFRAME_SCHEMA = vol.Schema(
    {
        vol.Required("geometry.wing_area"): _POSITIVE,
        vol.Required("geometry.span"): _POSITIVE,
        vol.Required("geometry.chord"): _POSITIVE,
        vol.Required("mass.dry"): _POSITIVE,
        vol.Required("mass.fuel_capacity"): _POSITIVE,
        vol.Required("mass.cg_full"): vector(3),
        vol.Required("mass.cg_empty"): vector(3),
        vol.Required("mass.inertia_full"): vector(4),
        vol.Required("mass.inertia_empty"): vector(4),
        **{vol.Required(f"aero.{key}"): _FLOAT for key in _AERO_KEYS},
        vol.Required("envelope.alpha_min"): _FLOAT,
        vol.Required("envelope.alpha_max"): _FLOAT,
        vol.Required("envelope.beta_max"): _POSITIVE,
        vol.Required("engine.max_power"): _POSITIVE,
        vol.Required("engine.specific_fuel_consumption"): _NONNEGATIVE,
        vol.Required("propeller.diameter"): _POSITIVE,
        vol.Required("propeller.thrust_coefficients"): vector(3),
        vol.Required("propeller.power_coefficients"): vector(4),
        vol.Required("propeller.advance_ratio_max"): _POSITIVE,
        vol.Optional("propeller.rotation", default=1.0): vol.All(
            vol.Coerce(float), vol.In([1.0, -1.0])
        ),
    }
)

GAIN_LOOPS = (
    "pitch",
    "pressure_altitude",
    "path_angle",
    "airspeed",
    "bank",
    "bearing",
    "sideslip",
)
_ANGULAR_LOOPS = ("bearing",)


def _loop_keys(loop: str) -> dict[vol.Marker, Any]:
    return {
        vol.Required(f"{loop}.kp"): _FLOAT,
        vol.Optional(f"{loop}.ki", default=0.0): _FLOAT,
        vol.Optional(f"{loop}.kd", default=0.0): _FLOAT,
        vol.Optional(f"{loop}.derivative_time_constant", default=0.05): _POSITIVE,
        vol.Optional(f"{loop}.ramp_rate", default=math.inf): _POSITIVE,
        vol.Optional(f"{loop}.output_min", default=-math.inf): _FLOAT,
        vol.Optional(f"{loop}.output_max", default=math.inf): _FLOAT,
    }


GAINS_SCHEMA = vol.Schema(
    {
        **{key: validator for loop in GAIN_LOOPS for key, validator in _loop_keys(loop).items()},
        vol.Optional("limits.surface", default=math.radians(25.0)): _POSITIVE,
        vol.Optional("limits.throttle_min", default=0.0): vol.All(
            vol.Coerce(float), vol.Range(min=0.0, max=1.0)
        ),
        vol.Optional("limits.throttle_max", default=1.0): vol.All(
            vol.Coerce(float), vol.Range(min=0.0, max=1.0)
        ),
    }
)


def validate(schema: vol.Schema, values: Mapping[str, Any], source: str) -> dict[str, Any]:
    """Validate raw values, naming the file and key on failure."""
    try:
        return schema(dict(values))
    except vol.MultipleInvalid as exception:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in error.path) or '<file>'}: {error.msg}"
            for error in exception.errors
        )
        raise ConfigError(f"{source}: {problems}") from exception
    except vol.Invalid as exception:
        raise ConfigError(f"{source}: {exception}") from exception


def sensor_spec_from_values(values: Mapping[str, Any]) -> SensorSpec:
    """Build a sensor specification from validated values."""

    def inertial(prefix: str) -> InertialSensorSpec:
        return InertialSensorSpec(
            scale_factor=values[f"{prefix}.scale_factor"],
            cross_coupling=values[f"{prefix}.cross_coupling"],
            bias_offset=values[f"{prefix}.bias_offset"],
            bias_walk=values[f"{prefix}.bias_walk"],
            noise_density=values[f"{prefix}.noise_density"],
        )

    def channel(name: str) -> ChannelSpec:
        return ChannelSpec(bias=values[f"air.{name}.bias"], noise=values[f"air.{name}.noise"])

    return SensorSpec(
        accelerometer=inertial("imu.accel"),
        gyroscope=inertial("imu.gyro"),
        magnetometer=MagnetometerSpec(
            scale_factor=values["mag.scale_factor"],
            cross_coupling=values["mag.cross_coupling"],
            hard_iron=values["mag.hard_iron"],
            noise=values["mag.noise"],
        ),
        air_data=AirDataSpec(**{name: channel(name) for name in _AIR_CHANNELS}),
        gnss=GnssSpec(
            position_noise=values["gnss.position_noise"],
            ionospheric_bias=values["gnss.ionospheric_bias"],
            ionospheric_walk=values["gnss.ionospheric_walk"],
            velocity_noise=values["gnss.velocity_noise"],
        ),
        platform=PlatformSpec(
            imu_position=values["platform.imu_position"],
            imu_misalignment=values["platform.imu_misalignment"],
            lever_arm_knowledge=values["platform.lever_arm_knowledge"],
        ),
        camera=CameraSpec(
            position=values["camera.position"],
            mounting=values["camera.mounting_deg"],
            misalignment=values["camera.misalignment"],
            mounting_knowledge=values["camera.mounting_knowledge"],
            focal_length=values["camera.focal_length"],
            width=values["camera.width"],
            height=values["camera.height"],
        ),
        alignment=AlignmentSpec(
            attitude=values["alignment.attitude"],
            accelerometer_bias=values["alignment.accelerometer_bias"],
            gyroscope_bias=values["alignment.gyroscope_bias"],
            hard_iron=values["alignment.hard_iron"],
        ),
    )


def airframe_from_values(values: Mapping[str, Any]) -> AirframeDefinition:
    """Build an airframe definition from validated values."""
    return AirframeDefinition(
        wing_area=values["geometry.wing_area"],
        span=values["geometry.span"],
        chord=values["geometry.chord"],
        dry_mass=values["mass.dry"],
        fuel_capacity=values["mass.fuel_capacity"],
        cg_full=values["mass.cg_full"],
        cg_empty=values["mass.cg_empty"],
        inertia_full=values["mass.inertia_full"],
        inertia_empty=values["mass.inertia_empty"],
        aero=AeroCoefficients(**{key: values[f"aero.{key}"] for key in _AERO_KEYS}),
        alpha_min=values["envelope.alpha_min"],
        alpha_max=values["envelope.alpha_max"],
        beta_max=values["envelope.beta_max"],
        max_power=values["engine.max_power"],
        specific_fuel_consumption=values["engine.specific_fuel_consumption"],
        propeller_diameter=values["propeller.diameter"],
        thrust_coefficients=values["propeller.thrust_coefficients"],
        power_coefficients=values["propeller.power_coefficients"],
        advance_ratio_max=values["propeller.advance_ratio_max"],
        propeller_rotation=values["propeller.rotation"],
    )


def gains_from_values(values: Mapping[str, Any]) -> ControlGains:
    """Build the autopilot gains from validated values."""

    def loop(name: str) -> PidGains:
        return PidGains(
            kp=values[f"{name}.kp"],
            ki=values[f"{name}.ki"],
            kd=values[f"{name}.kd"],
            derivative_time_constant=values[f"{name}.derivative_time_constant"],
            ramp_rate=values[f"{name}.ramp_rate"],
            output_min=values[f"{name}.output_min"],
            output_max=values[f"{name}.output_max"],
            angular=name in _ANGULAR_LOOPS,
        )

    if values["limits.throttle_min"] > values["limits.throttle_max"]:
        raise ConfigError("limits.throttle_min exceeds limits.throttle_max")
    return ControlGains(
        **{name: loop(name) for name in GAIN_LOOPS},
        surface_limit=values["limits.surface"],
        throttle_min=values["limits.throttle_min"],
        throttle_max=values["limits.throttle_max"],
    )


def load_sensor_spec(path: Path = DEFAULT_SENSORS_FILE) -> SensorSpec:
    """Read a sensor specification file."""
    return sensor_spec_from_values(validate(SENSORS_SCHEMA, read_key_values(path), str(path)))


def load_airframe(path: Path = DEFAULT_AIRFRAME_FILE) -> AirframeDefinition:
    """Read an airframe definition file."""
    return airframe_from_values(validate(AIRFRAME_SCHEMA, read_key_values(path), str(path)))


def load_gains(path: Path = DEFAULT_GAINS_FILE) -> ControlGains:
    """Read a gains and limits file."""
    return gains_from_values(validate(GAINS_SCHEMA, read_key_values(path), str(path)))


def _canonical(value: Any) -> str:
    if isinstance(value, tuple):
        return " ".join(_canonical(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_hash(sections: Mapping[str, Mapping[str, Any]]) -> str:
    """Return the SHA-256 of the canonical serialization of validated sections."""
    digest = hashlib.sha256()
    for section in sorted(sections):
        for key in sorted(sections[section]):
            digest.update(f"{section}:{key} = {_canonical(sections[section][key])}\n".encode())
    return digest.hexdigest()


@dataclass(frozen=True, kw_only=True)
class RunConfig:
    """Validated batch configuration with its referenced specifications loaded."""

    master_seed: int
    run_count: int
    scenario: int
    zone: str
    zones: tuple[str, ...]
    integrator: str
    navigation: str
    sensors_file: Path
    airframe_file: Path
    gains_file: Path
    output_dir: Path
    parallelism: int
    duration: float | None
    gnss_denied_time: float
    turbulence_severity: str
    gravity_std_horizontal: float
    gravity_std_vertical: float
    magnetic_std: tuple[float, float, float]
    wind_end_reference: str
    truth_stride: int
    write_traces: bool
    ratio_threshold: float
    drift_threshold: float
    sensors: SensorSpec
    airframe: AirframeDefinition
    gains: ControlGains
    config_hash: str
    hashed_sections: Mapping[str, Mapping[str, Any]] = field(repr=False, compare=False)

    def with_zone(self, zone: str) -> RunConfig:
        """Return a copy flying in another terrain zone, writing under a zone subdirectory."""
        run = {**self.hashed_sections["run"], CONF_ZONE: zone}
        sections = {**self.hashed_sections, "run": run}
        return replace(
            self,
            zone=zone,
            output_dir=self.output_dir / zone,
            config_hash=config_hash(sections),
            hashed_sections=sections,
        )


def _resolve(reference: str | None, base: Path, default: Path) -> Path:
    if reference is None:
        return default
    path = Path(reference)
    return path if path.is_absolute() else base / path


def build_run_config(
    values: Mapping[str, Any], base: Path = Path(), source: str = "<run config>"
) -> RunConfig:
    """Validate run values, load the files they reference and hash the whole set."""
    run = validate(RUN_SCHEMA, values, source)
    sensors_file = _resolve(run.get(CONF_SENSORS_FILE), base, DEFAULT_SENSORS_FILE)
    airframe_file = _resolve(run.get(CONF_AIRFRAME_FILE), base, DEFAULT_AIRFRAME_FILE)
    gains_file = _resolve(run.get(CONF_GAINS_FILE), base, DEFAULT_GAINS_FILE)
    sensors = validate(SENSORS_SCHEMA, read_key_values(sensors_file), str(sensors_file))
    airframe = validate(AIRFRAME_SCHEMA, read_key_values(airframe_file), str(airframe_file))
    gains = validate(GAINS_SCHEMA, read_key_values(gains_file), str(gains_file))

    if run[CONF_NAVIGATION] not in NAVIGATION_SYSTEMS:
        raise ConfigError(
            f"{source}: {CONF_NAVIGATION}: unknown navigation system {run[CONF_NAVIGATION]};"
            f" known: {', '.join(sorted(NAVIGATION_SYSTEMS))}"
        )
    hashed_run = {key: value for key, value in run.items() if key not in _UNHASHED_KEYS}
    sections = {"run": hashed_run, "sensors": sensors, "airframe": airframe, "gains": gains}
    digest = config_hash(sections)
    _LOGGER.debug("Configuration %s loaded from %s", digest[:12], source)
    return RunConfig(
        master_seed=run[CONF_MASTER_SEED],
        run_count=run[CONF_RUN_COUNT],
        scenario=run[CONF_SCENARIO],
        zone=run[CONF_ZONE],
        zones=run[CONF_ZONES],
        integrator=run[CONF_INTEGRATOR],
        navigation=run[CONF_NAVIGATION],
        sensors_file=sensors_file,
        airframe_file=airframe_file,
        gains_file=gains_file,
        output_dir=Path(run[CONF_OUTPUT_DIR]),
        parallelism=run[CONF_PARALLELISM],
        duration=run.get(CONF_DURATION),
        gnss_denied_time=run[CONF_GNSS_DENIED_TIME],
        turbulence_severity=run[CONF_TURBULENCE],
        gravity_std_horizontal=run[CONF_GRAVITY_STD_HORIZONTAL],
        gravity_std_vertical=run[CONF_GRAVITY_STD_VERTICAL],
        magnetic_std=run[CONF_MAGNETIC_STD],
        wind_end_reference=run[CONF_WIND_END_REFERENCE],
        truth_stride=run[CONF_TRUTH_STRIDE],
        write_traces=run[CONF_WRITE_TRACES],
        ratio_threshold=run[CONF_RATIO_THRESHOLD],
        drift_threshold=run[CONF_DRIFT_THRESHOLD],
        sensors=sensor_spec_from_values(sensors),
        airframe=airframe_from_values(airframe),
        gains=gains_from_values(gains),
        config_hash=digest,
        hashed_sections=sections,
    )


def load_run_config(
    path: Path | None = None, overrides: Mapping[str, str] | None = None
) -> RunConfig:
    """Read a run file, apply ``key = value`` overrides and load what it references.

    Relative file references resolve against the directory of the run file.
    """
    path = Path(path) if path is not None else DEFAULT_RUN_FILE
    values: dict[str, Any] = read_key_values(path)
    values.update(overrides or {})
    return build_run_config(values, path.parent, str(path))
