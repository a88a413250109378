import os

# ============== Base Paths ==============
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
OUTPUT_DIR = os.path.join(BASE_DIR, "output")

# ============== Logging ==============
LOG_FILE = os.path.join(BASE_DIR, "logs", "trigfit.log")
LOG_LEVEL = os.environ.get("TRIGFIT_LOG_LEVEL", "INFO").upper()

# ============== Fit1D Output Paths ==============
FIT1D_OUTPUT_DIR = os.path.join(OUTPUT_DIR, "fit1d")
FIT1D_JSON_PATH = os.path.join(FIT1D_OUTPUT_DIR, "coefficients.json")
FIT1D_GRID_PATH = os.path.join(FIT1D_OUTPUT_DIR, "grid.csv")

# ============== Curve Output Paths ==============
CURVE_OUTPUT_DIR = os.path.join(OUTPUT_DIR, "curve")
CURVE_JSON_PATH = os.path.join(CURVE_OUTPUT_DIR, "coefficients.json")
CURVE_GRID_PATH = os.path.join(CURVE_OUTPUT_DIR, "contour.csv")

# ============== Sequence Output Paths ==============
SEQ_OUTPUT_DIR = os.path.join(OUTPUT_DIR, "sequence")
SEQ_SUMMARY_PATH = os.path.join(SEQ_OUTPUT_DIR, "summary.json")

# ============== Diagnostics Output Paths ==============
DIAG_OUTPUT_DIR = os.path.join(OUTPUT_DIR, "diag")
DIAG_JSON_PATH = os.path.join(DIAG_OUTPUT_DIR, "report.json")

# ============== Numerics ==============
# Breakdown is declared when beta <= BREAKDOWN_BETA_TOL * t_0
# or |alpha| >= 1 - BREAKDOWN_ALPHA_TOL.
BREAKDOWN_BETA_TOL = 1e-13
BREAKDOWN_ALPHA_TOL = 1e-13

# A relative squared residual below ROUNDOFF_FLOOR * r * machine epsilon is
# roundoff and satisfies any epsilon.
ROUNDOFF_FLOOR = 100

# Dense reference solves refuse larger degrees.
ORACLE_MAX_DEGREE = 64

DEFAULT_EPSILON = 0.05
DEFAULT_GRID_SIZE = 256

# A recovered contour needs at least one nonconstant harmonic per line.
MIN_LINE_DEGREE = 1

# ============== Weights ==============
WEIGHTS_VORONOI = "voronoi"
WEIGHTS_UNIFORM = "uniform"
WEIGHTS_FILE = "file"
WEIGHTS_MODES = (WEIGHTS_VORONOI, WEIGHTS_UNIFORM, WEIGHTS_FILE)

# ============== Exit Codes ==============
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_BREAKDOWN = 2
EXIT_NOT_CONVERGED = 3

# ============== Parallelism ==============
THREADS_ENV_VAR = "TRIGFIT_THREADS"


def get_thread_count() -> int:
    """Worker cap from TRIGFIT_THREADS (defaults to 1, never below 1)."""
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)
