import os

from dotenv import load_dotenv

load_dotenv()

# Truncation and grids
TRUNCATION: int = int(os.getenv("TRUNCATION", "256"))
EXPERIMENT_TRUNCATION: int = int(os.getenv("EXPERIMENT_TRUNCATION", "2048"))
GRID_SIZE: int = int(os.getenv("GRID_SIZE", "4096"))
SERIES_N_MAX: int = int(os.getenv("SERIES_N_MAX", "1000000"))

# Solver
SOLVER_METHOD: str = os.getenv("SOLVER_METHOD", "cg")
NEUMANN_TOL = float(os.getenv("NEUMANN_TOL", "1e-13"))
RICHARDSON = os.getenv("RICHARDSON", "true").lower() in ("1", "true", "yes")

# Tolerances
HERMITIAN_TOL = float(os.getenv("HERMITIAN_TOL", "1e-10"))
PD_FLOOR = float(os.getenv("PD_FLOOR", "1e-12"))
CONSTANCY_WARN_TOL = float(os.getenv("CONSTANCY_WARN_TOL", "1e-3"))
CONSTANCY_GUARD = float(os.getenv("CONSTANCY_GUARD", "0.05"))

# Inner maps
EVALUATION_RADIUS = float(os.getenv("EVALUATION_RADIUS", str(1.0 - 2.0**-12)))

# Experiments
SEED = int(os.getenv("SEED", "20240521"))
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "reports")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
