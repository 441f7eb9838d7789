"""
Central configuration file for the ghost scaling suite.
This file contains shared settings used by the library, the CLI and the plot script.
"""

import math

# Sweep grid toward the bifurcation (r -> 0+), log-spaced
# Current setup: 25 points between 1e-8 and 1e-3
DEFAULT_R_LO = 1e-8
DEFAULT_R_HI = 1e-3
DEFAULT_POINTS = 25
MIN_POINTS = 3

# Alternative grids (uncomment to use):

# Quick look, 9 points over the same decades
# DEFAULT_POINTS = 9

# Deeper asymptotics, expensive for the ODE engine
# DEFAULT_R_LO = 1e-12

# Transit interval for passage times
DEFAULT_INTERVAL = (-1.0, 1.0)

# Quadrature engine
QUAD_REL_TOL = 1e-10
QUAD_ABS_TOL = 1e-14
QUAD_MAX_SUBDIVISIONS = 10**6
SPLIT_RATIO = 10.0        # geometric spacing of split points around the bottleneck width
MAX_SCALE_SPLITS = 48     # per side of the kink

# ODE engine (embedded Runge-Kutta 4(5))
ODE_REL_TOL = 1e-8
ODE_ABS_TOL = 1e-10
ODE_MAX_STEPS = 10**8
ODE_EVENT_TOL = 1e-12

# Fixed points
ROOT_TOL = 1e-12

# Model selection
CONSTANT_BAND = 0.10      # constant wins at or below this relative rmse
LOG_MARGIN = 0.05         # logarithmic wins if rmse_log <= rmse_power + LOG_MARGIN
POWER_EXPONENT_BOUNDS = (1e-3, 8.0)
POWER_PROFILE_GRID = 161

# Pendulum model problem
PENDULUM_INTERVAL = (math.pi / 4, 3 * math.pi / 4)
L_MAX = 100.0

# Parallelism: GHOST_THREADS env var, unset -> serial, 0 -> all cores
THREADS_ENV_VAR = "GHOST_THREADS"
DEFAULT_THREADS = 1

# Output settings
CSV_FLOAT_FORMAT = ".16e"
SAMPLE_FIELDNAMES = ["r", "t", "engine", "phase", "param"]
FIT_KEYS = ["model", "exponent", "prefactor", "intercept", "rmse", "r_squared"]
PASSAGE_KEYS = ["time", "engine", "error_estimate", "evaluations"]
RESULTS_DIR = "results"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
