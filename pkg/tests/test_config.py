"""Tests for the configuration files."""

import math
from pathlib import Path

import pytest

from swapsim.config import (
    DEFAULT_SENSORS_FILE,
    build_run_config,
    load_gains,
    load_run_config,
    parse_key_values,
    read_key_values,
)
from swapsim.const import (
    CONF_MASTER_SEED,
    CONF_NAVIGATION,
    CONF_OUTPUT_DIR,
    CONF_PARALLELISM,
    CONF_SCENARIO,
    CONF_ZONE,
    CONF_ZONES,
    GNSS_DENIED_TIME,
    INTEGRATOR_SO3,
    NAVIGATION_DEAD_RECKONING,
)
from swapsim.exceptions import ConfigError


def test_parse_key_values():
    """Test comments, blank lines and repeated keys."""
    values = parse_key_values(
        "# header\n\nalpha = 1   # trailing\n beta=two words \nalpha = 3\n"
    )
    assert values == {"alpha": "3", "beta": "two words"}


@pytest.mark.parametrize("text", ["no separator", " = 3"])
def test_parse_key_values_malformed(text):
    """Test malformed lines name the source and line."""
    with pytest.raises(ConfigError, match="test.cfg:2"):
        parse_key_values(f"a = 1\n{text}\n", "test.cfg")


def test_missing_file(tmp_path: Path):
    """Test an unreadable file is a configuration error."""
    with pytest.raises(ConfigError):
        read_key_values(tmp_path / "missing.cfg")


def test_default_run_config():
    """Test the packaged configuration loads with its defaults."""
    config = load_run_config()

    assert config.master_seed == 1
    assert config.run_count == 100
    assert config.scenario == 1
    assert config.zone == "DS"
    assert config.integrator == INTEGRATOR_SO3
    assert config.navigation == NAVIGATION_DEAD_RECKONING
    assert config.gnss_denied_time == GNSS_DENIED_TIME
    assert config.magnetic_std == (131.0, 94.0, 157.0)
    assert config.duration is None
    assert config.write_traces
    assert config.sensors_file == DEFAULT_SENSORS_FILE
    assert len(config.config_hash) == 64


def test_overrides():
    """Test overrides take precedence over the run file."""
    config = load_run_config(
        overrides={CONF_MASTER_SEED: "42", CONF_SCENARIO: "2", CONF_ZONE: "mx"}
    )
    assert config.master_seed == 42
    assert config.scenario == 2
    assert config.zone == "MX"


@pytest.mark.parametrize(
    ("key", "value"),
    [
        (CONF_SCENARIO, "3"),
        (CONF_ZONE, "XX"),
        (CONF_ZONES, "DS, XX"),
        (CONF_NAVIGATION, "kalman"),
        (CONF_MASTER_SEED, "-1"),
        ("run_count", "0"),
        ("geo.magnetic_std", "1, 2"),
        ("unknown_key", "1"),
    ],
)
def test_invalid_values(key, value):
    """Test invalid run values are rejected."""
    with pytest.raises(ConfigError):
        build_run_config({key: value})


def test_zones_list():
    """Test a zone list parses into codes."""
    config = build_run_config({CONF_ZONES: "ds, fr mx"})
    assert config.zones == ("DS", "FR", "MX")


def test_hash_ignores_execution_settings(tmp_path: Path):
    """Test settings that do not change results leave the hash alone."""
    base = build_run_config({})
    moved = build_run_config({CONF_OUTPUT_DIR: str(tmp_path), CONF_PARALLELISM: "4"})
    reseeded = build_run_config({CONF_MASTER_SEED: "2"})

    assert moved.config_hash == base.config_hash
    assert reseeded.config_hash != base.config_hash
    assert build_run_config({}).config_hash == base.config_hash


def test_relative_references(tmp_path: Path):
    """Test file references resolve against the run file directory."""
    sensors = DEFAULT_SENSORS_FILE.read_text(encoding="utf-8")
    (tmp_path / "sensors.cfg").write_text(
        sensors + "\nimu.accel.bias_offset = 0.5\n", encoding="utf-8"
    )
    run_file = tmp_path / "run.cfg"
    run_file.write_text("sensors_file = sensors.cfg\nrun_count = 3\n", encoding="utf-8")

    config = load_run_config(run_file)

    assert config.sensors_file == tmp_path / "sensors.cfg"
    assert config.sensors.accelerometer.bias_offset == 0.5
    assert config.run_count == 3
    assert config.config_hash != build_run_config({"run_count": "3"}).config_hash


def test_invalid_sensor_file(tmp_path: Path):
    """Test a bad value in a referenced file names that file."""
    (tmp_path / "sensors.cfg").write_text("imu.gyro.bias_walk = -1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="sensors.cfg"):
        build_run_config({"sensors_file": "sensors.cfg"}, tmp_path)


def test_gains_file(tmp_path: Path):
    """Test loop gains, defaults and the throttle limit check."""
    gains = load_gains()
    assert gains.bearing.angular
    assert not gains.bank.angular
    assert gains.bank.output_max == pytest.approx(0.35)

    path = tmp_path / "gains.cfg"
    loops = ("pitch", "pressure_altitude", "path_angle", "airspeed", "bank", "bearing", "sideslip")
    path.write_text(
        "\n".join(f"{loop}.kp = 1" for loop in loops) + "\nlimits.throttle_min = 0.9\n"
        "limits.throttle_max = 0.1\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError):
        load_gains(path)

    path.write_text("\n".join(f"{loop}.kp = 1" for loop in loops), encoding="utf-8")
    minimal = load_gains(path)
    assert minimal.pitch.ramp_rate == math.inf
    assert minimal.surface_limit == pytest.approx(math.radians(25.0))


def test_with_zone(tmp_path: Path):
    """Test a zone copy writes under its own subdirectory."""
    config = build_run_config({CONF_OUTPUT_DIR: str(tmp_path)})
    moved = config.with_zone("FR")
    assert moved.zone == "FR"
    assert moved.output_dir == tmp_path / "FR"
    assert config.zone == "DS"


def test_with_zone_hash(tmp_path: Path):
    """Test a zone copy carries the hash of the same configuration built for that zone."""
    config = build_run_config({CONF_OUTPUT_DIR: str(tmp_path)})
    urban = build_run_config({CONF_OUTPUT_DIR: str(tmp_path), CONF_ZONE: "UR"})

    assert config.with_zone("UR").config_hash == urban.config_hash
    assert config.with_zone("UR").config_hash != config.config_hash
    assert config.with_zone("DS").config_hash == config.config_hash
    assert config.with_zone("UR").with_zone("DS").config_hash == config.config_hash
