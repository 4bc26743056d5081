"""Shared configuration for the qmagic toolkit"""

import os

# Load from environment variables (see .env.example); main.py loads .env first


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be a number, got {raw!r}") from exc


# Execution policy
THREADS = _env_int("QMAGIC_THREADS", os.cpu_count() or 1)
# Worker processes instead of threads for CPU-bound sweeps and suites
PROCESSES = _env_int("QMAGIC_PROCESSES", 0) != 0
SEED = _env_int("QMAGIC_SEED", 7)
LOG_LEVEL = os.environ.get("QMAGIC_LOG_LEVEL", "WARNING").upper()

# Non-local magic optimizer
NL_STARTS = _env_int("QMAGIC_NL_STARTS", 32)
NL_F_TOL = _env_float("QMAGIC_NL_F_TOL", 1e-10)
NL_X_TOL = _env_float("QMAGIC_NL_X_TOL", 1e-8)
NL_MAX_EVALS = _env_int("QMAGIC_NL_MAX_EVALS", 2000)
# Stop the multi-start search once this many starts land on the best value (0 = run all)
NL_AGREE = _env_int("QMAGIC_NL_AGREE", 4)

# Møller angle guard band (rad) from the forward/backward singularities
THETA_GUARD = _env_float("QMAGIC_THETA_GUARD", 1e-6)

# Sampling sizes
CLIFFORD_SAMPLES = _env_int("QMAGIC_CLIFFORD_SAMPLES", 5000)
BOOTSTRAP_RESAMPLES = _env_int("QMAGIC_BOOTSTRAP_RESAMPLES", 200)

if THREADS < 1:
    raise ValueError(f"QMAGIC_THREADS must be >= 1, got {THREADS}")
if NL_STARTS < 1:
    raise ValueError(f"QMAGIC_NL_STARTS must be >= 1, got {NL_STARTS}")
if NL_AGREE < 0:
    raise ValueError(f"QMAGIC_NL_AGREE must be >= 0, got {NL_AGREE}")
if not 0.0 < THETA_GUARD < 0.1:
    raise ValueError(f"QMAGIC_THETA_GUARD must lie in (0, 0.1), got {THETA_GUARD}")
