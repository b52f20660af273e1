# nsmoo/core/utils.py
import os
from typing import Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from nsmoo.core.errors import DimensionMismatchError, PreconditionError

# Load environment variables
load_dotenv()

def get_env_value(key: str, default: str = None) -> str:
    """Get environment variable value with optional default"""
    return os.getenv(key, default)

def get_env_int(key: str, default: int) -> int:
    """Integer environment value; malformed values fall back to the default"""
    try:
        return int(get_env_value(key, str(default)))
    except (TypeError, ValueError):
        return default

def as_vector(x: Sequence[float], n: Optional[int] = None, name: str = "x") -> np.ndarray:
    """
    Convert input to a finite float vector, optionally checking its length.

    Raises:
        PreconditionError: non-finite entries
        DimensionMismatchError: wrong length
    """
    v = np.array(x, dtype=float).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise DimensionMismatchError(f"{name} has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise PreconditionError(f"{name} must be finite, got {v}")
    return v

def sign_with_zero(x: np.ndarray) -> np.ndarray:
    """sign(x) with the 0 element of [-1, 1] at the kink"""
    return np.sign(x).astype(float)
