"""Numerical constants and output names shared across modules."""

# Linear algebra tolerances
FULL_RANK_RTOL = 1e-10  # smallest/largest singular value of a factor
GRAM_PD_RTOL = 1e-12  # smallest/largest eigenvalue of YᴴY
NUMERIC_RANK_RTOL = 1e-6
HORIZONTAL_RTOL = 1e-10
GRADIENT_HORIZONTAL_RTOL = 1e-8
GRADIENT_ROUNDING_SLACK = 1e3  # multiples of machine eps on ‖G‖·‖Y‖²

# Rank acceptance
RESIDUAL_TOL = 1e-3
COST_EPSILON = 1e-10
COST_FLOOR = 1e-16

# Solver defaults
GRAD_TOL = 1e-8
MAX_ITERS = 500
ARMIJO_C1 = 1e-4
ARMIJO_BACKTRACK = 0.5
ARMIJO_INITIAL_STEP = 1.0
ARMIJO_MAX_BACKTRACKS = 50
MAX_STEP_HALVINGS = 30
BETA_BREAKDOWN = 1e-14
TR_DELTA0 = 1.0
TR_DELTA_MAX = 100.0
TR_RHO_ACCEPT = 0.1
TR_RHO_SHRINK = 0.25
TR_RHO_EXPAND = 0.75
TR_SHRINK_FACTOR = 0.25
TR_EXPAND_FACTOR = 2.0
TR_MIN_RADIUS = 1e-14
RHO_REGULARIZATION = 1e3
TCG_KAPPA = 0.1
TCG_THETA = 1.0
ALTMIN_INNER_MAX_ITERS = 100
ALTMIN_INNER_TOL_FACTOR = 1e-2

# Experiments
NOISE_POWER_PATHLOSS = 1e-12  # -120 dB
NOISE_POWER_GENERIC = 1.0
PATHLOSS_INTERCEPT_DB = 128.1
PATHLOSS_SLOPE_DB = 37.6
DISTANCE_RANGE_KM = (0.1, 0.2)
ALIGNMENT_TOL = 1e-6
DEFAULT_TRIALS = 50
PAD_COLUMN_SCALE = 1e-3

# Output file names
RESULT_FILE = "result.json"
BEAMFORMERS_FILE = "beamformers.npz"
SWEEP_CSV_FILE = "sweep.csv"
SWEEP_SUMMARY_FILE = "summary.json"
CHECKS_FILE = "checks.json"
BENCH_FILE = "bench.json"

SWEEP_CSV_COLUMNS = (
    "sweep_var",
    "value",
    "solver",
    "trial",
    "rank",
    "dof",
    "residual",
    "leakage",
    "sum_rate",
    "iters",
    "seconds",
)

# CLI exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_SEARCH_FAILED = 2
EXIT_CHECKS_FAILED = 2
EXIT_INTERRUPTED = 130
