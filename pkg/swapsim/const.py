"""Constants used for swapsim."""

DOMAIN = "swapsim"

# Seed hierarchy, in the fixed draw order.
MODULE_SEED_NAMES = (
    "ACC",
    "GYR",
    "MAG",
    "OSP",
    "OAT",
    "GNSS",
    "TAS",
    "AOA",
    "AOS",
    "PLAT",
    "CAM",
    "WIND",
    "WEATHER",
    "TURB",
    "MISSION",
    "GEO",
    "ALIGN",
)

DEFAULT_MASTER_SEED = 1
DEFAULT_RUN_COUNT = 100
DEFAULT_PARALLELISM = 1
MAX_CONSTRAINT_REDRAWS = 1_000_000

# Rates, expressed as integer multiples of the truth step.
TRUTH_STEP = 0.002
SENSED_STEP = 0.01
CONTROL_STEP = 0.02
GNSS_STEP = 1.0
TRUTH_PER_SENSED = 5
TRUTH_PER_CONTROL = 10
TRUTH_PER_CAMERA = 50
TRUTH_PER_GNSS = 500

# WGS84 defining and derived constants.
WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_B = WGS84_A * (1.0 - WGS84_F)
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)
WGS84_GM = 3.986004418e14
WGS84_OMEGA = 7.292115e-5
GAMMA_EQUATOR = 9.7803253359
GAMMA_POLE = 9.8321849378
EARTH_RADIUS_MEAN = 6371000.0

# Standard atmosphere (troposphere).
T0 = 288.15
P0 = 101325.0
G0 = 9.80665
R_AIR = 287.05287
RHO0 = P0 / (R_AIR * T0)
BETA_T = -0.0065
HP_MIN = -5000.0
HP_TROPOPAUSE = 11000.0

FT_TO_M = 0.3048

# Scenario constants.
SCENARIO_1 = 1
SCENARIO_2 = 2
SCENARIOS = (SCENARIO_1, SCENARIO_2)
GNSS_DENIED_TIME = 100.0
SCENARIO_1_END = 3800.0
SCENARIO_2_END = 500.0
TURN_BANK_DEG = 10.0
CLIMB_PATH_DEG = 2.0

INTEGRATOR_SO3 = "so3"
INTEGRATOR_R4NORM = "r4norm"
INTEGRATORS = (INTEGRATOR_SO3, INTEGRATOR_R4NORM)

NAVIGATION_IDEAL = "ideal"
NAVIGATION_DEAD_RECKONING = "strapdown-dr"

TURBULENCE_SEVERITIES = ("none", "light", "moderate", "severe")

DEFAULT_RATIO_THRESHOLD = 0.3
DEFAULT_DRIFT_THRESHOLD = 0.2

# Run configuration keys.
CONF_MASTER_SEED = "master_seed"
CONF_RUN_COUNT = "run_count"
CONF_SCENARIO = "scenario"
CONF_ZONE = "zone"
CONF_ZONES = "zones"
CONF_INTEGRATOR = "integrator"
CONF_NAVIGATION = "navigation"
CONF_SENSORS_FILE = "sensors_file"
CONF_AIRFRAME_FILE = "airframe_file"
CONF_GAINS_FILE = "gains_file"
CONF_OUTPUT_DIR = "output_dir"
CONF_PARALLELISM = "parallelism"
CONF_DURATION = "duration"
CONF_GNSS_DENIED_TIME = "gnss_denied_time"
CONF_TURBULENCE = "turbulence_severity"
CONF_GRAVITY_STD_HORIZONTAL = "geo.gravity_std_horizontal"
CONF_GRAVITY_STD_VERTICAL = "geo.gravity_std_vertical"
CONF_MAGNETIC_STD = "geo.magnetic_std"
CONF_WIND_END_REFERENCE = "wind_end_reference"
CONF_TRUTH_STRIDE = "truth_stride"
CONF_WRITE_TRACES = "write_traces"
CONF_RATIO_THRESHOLD = "classification.ratio_threshold"
CONF_DRIFT_THRESHOLD = "classification.drift_threshold"

DEFAULT_ZONE = "DS"
DEFAULT_OUTPUT_DIR = "output"
DEFAULT_TURBULENCE = "light"
DEFAULT_GRAVITY_STD_HORIZONTAL = 5e-4
DEFAULT_GRAVITY_STD_VERTICAL = 3e-4
DEFAULT_MAGNETIC_STD = (131.0, 94.0, 157.0)
WIND_END_REFERENCES = ("temperature", "wind")
