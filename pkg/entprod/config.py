import math
from enum import Enum


class LogBase(str, Enum):
    """Logarithm base used for every reported logarithmic quantity."""
    NATURAL = "e"
    BASE2 = "2"

    def convert(self, value_natural: float) -> float:
        """Converts a natural-log value into this base."""
        if self is LogBase.BASE2:
            return value_natural / math.log(2.0)
        return value_natural


class Config:
    LOG_BASE = LogBase.NATURAL
    LOG_LEVEL = "WARNING"
    LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

    # Validation tolerances
    HERMITIAN_TOL = 1e-9        # relative to max |entry|
    TRACE_TOL = 1e-9
    PSD_TOL = 1e-9
    DEGENERACY_FACTOR = 1e-8    # times the spectral range
    TRACE_ZERO_TOL = 1e-12
    OUTCOME_TOL = 1e-12
    NORMALIZATION_TOL = 1e-10

    # Numerics
    OVERFLOW_EXPONENT = 700.0
    EXACT_FACTORIAL_LIMIT = 170
    ORACLE_MAX_PARTICLES = 8
    CLI_ORACLE_MAX_PARTICLES = 6

    # Output
    CSV_SIGNIFICANT_DIGITS = 12

    MAX_WORKERS = None  # ThreadPoolExecutor default
