# ================================================
# Runtime Configuration for signms
# --------------------------------
# - Loads optional .env file (python-dotenv)
# - Worker cap, output folder and log level from env
# - Numeric tolerances shared by all solver stages
# ================================================

import os
from dotenv import load_dotenv

# Load environment variables from .env file (optional but useful)
load_dotenv()


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# ==========================================
# WORKERS
# SIGNMS_THREADS caps element/patch workers (joblib)
# ==========================================
def worker_count():
    cap = _env_int("SIGNMS_THREADS", 0)
    cores = os.cpu_count() or 1
    if cap <= 0:
        return cores
    return max(1, min(cap, cores))


# ==========================================
# OUTPUT + LOGGING
# ==========================================
OUTPUT_DIR = os.getenv("SIGNMS_OUTPUT_DIR", "results")
LOG_LEVEL = os.getenv("SIGNMS_LOG_LEVEL", "INFO")

# ==========================================
# TOLERANCES
# ==========================================
# Fine-scale and patch solves: relative residual on free dofs
FINE_RTOL = 1e-8

# Coarse Galerkin solve: relative residual
COARSE_RTOL = 1e-10

# Above this many coarse unknowns the coarse system goes through sparse LU
DENSE_COARSE_LIMIT = _env_int("SIGNMS_DENSE_COARSE_LIMIT", 6000)

# Eigenvalue sanity bounds for the element pencils
EIGEN_ZERO_RTOL = 1e-10
EIGEN_NEGATIVE_ATOL = 1e-10

# Default threshold the resolution ratio is flagged against
RESOLUTION_THRESHOLD = 1.0
