"""
Two-qubit Ising register in a longitudinal field.

H = -B (S1z + S2z) - 2J S1z S2z, diagonal in the product sigma-z basis.
Dimensionless variables: T = 1/(beta |J|), h = B/|J|.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from entprod.batch import ordered_map
from entprod.config import Config, LogBase
from entprod.errors import ValidationError
from entprod.hilbert import DenseOperator, SpaceLayout

# Set up logging
logger = logging.getLogger(__name__)

REGISTER_LAYOUT = SpaceLayout((2, 2))
FIELD_MATCH_TOL = 1e-12  # |h - 1| below this selects the h = 1 low-temperature branch


class Coupling(str, Enum):
    FERRO = "ferro"
    ANTIFERRO = "antiferro"

    @property
    def sign(self) -> int:
        return 1 if self is Coupling.FERRO else -1


class Regime(str, Enum):
    FERRO_LOW_T = "ferro_low_t"
    FERRO_SMALL_FIELD = "ferro_small_field"
    FERRO_HIGH_T = "ferro_high_t"
    FERRO_LARGE_FIELD = "ferro_large_field"
    ANTIFERRO_LOW_T = "antiferro_low_t"
    ANTIFERRO_SMALL_FIELD = "antiferro_small_field"
    ANTIFERRO_HIGH_T = "antiferro_high_t"
    ANTIFERRO_LARGE_FIELD = "antiferro_large_field"

    @property
    def coupling(self) -> Coupling:
        return Coupling.FERRO if self.value.startswith("ferro") else Coupling.ANTIFERRO


@dataclass(frozen=True)
class RegisterParams:
    temperature: float
    field: float
    coupling: Coupling = Coupling.FERRO

    def __post_init__(self):
        object.__setattr__(self, "coupling", Coupling(self.coupling))
        if not self.temperature > 0:
            raise ValidationError(f"temperature must be > 0, got {self.temperature}", invariant="temperature")
        if not self.field >= 0:
            raise ValidationError(f"field must be >= 0, got {self.field}", invariant="field")


@dataclass(frozen=True)
class RawParams:
    beta: float
    field_B: float
    coupling_J: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError(f"beta must be > 0, got {self.beta}", invariant="beta")


@dataclass(frozen=True)
class GridRange:
    """``steps`` intervals from start to stop, so steps + 1 points; steps = 0 is the single point start == stop."""
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 0:
            raise ValidationError(f"grid needs steps >= 0, got {self.steps}", invariant="range")
        if (self.steps == 0) != (self.start == self.stop):
            raise ValidationError("steps = 0 exactly when start == stop", invariant="range")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps + 1)


@dataclass(frozen=True)
class SweepRow:
    temperature: float
    field: float
    epsilon: float
    asymptotics: tuple[float | None, ...] = ()


def to_raw(p: RegisterParams) -> RawParams:
    return RawParams(beta=1.0 / p.temperature, field_B=p.field, coupling_J=float(p.coupling.sign))


def hamiltonian(raw: RawParams) -> DenseOperator:
    b, j = raw.field_B, raw.coupling_J
    return DenseOperator(REGISTER_LAYOUT, np.diag([-b - j / 2, j / 2, j / 2, b - j / 2]).astype(complex))


# --- Log-space closed forms ---

def _exponents(raw: RawParams) -> tuple[float, float]:
    return raw.beta * raw.field_B, raw.beta * raw.coupling_J


def log_partition_fn(raw: RawParams) -> float:
    b, j = _exponents(raw)
    return float(logsumexp([b + j / 2, -b + j / 2, -j / 2, -j / 2]))


def log_f1(raw: RawParams) -> float:
    b, j = _exponents(raw)
    return float(logsumexp([2 * b + j, -2 * b + j, -j, -j]))


def log_f2(raw: RawParams) -> float:
    b, j = _exponents(raw)
    log2 = math.log(2.0)
    return 2.0 * float(logsumexp([2 * b + j, -2 * b + j, -j, -j, b + log2, -b + log2]))


def _needs_log_space(raw: RawParams) -> bool:
    # f2 carries the largest exponent, 2(2|bB| + |bJ|)
    b, j = _exponents(raw)
    return 2 * (2 * abs(b) + abs(j)) > Config.OVERFLOW_EXPONENT


# --- Hyperbolic closed forms ---

def partition_fn(raw: RawParams) -> float:
    """
    Z = 2[cosh(bB)+1]cosh(bJ/2) + 2[cosh(bB)-1]sinh(bJ/2).

    Evaluated as 2 cosh(bB) e^{bJ/2} + 2 e^{-bJ/2}, a sum of positive terms.
    Switches to the log-space form when the terms would overflow.
    """
    if _needs_log_space(raw):
        return float(np.exp(log_partition_fn(raw)))
    b, j = _exponents(raw)
    return 2 * math.cosh(b) * math.exp(j / 2) + 2 * math.exp(-j / 2)


def f1(raw: RawParams) -> float:
    """f1 = 2[cosh(2bB)+1]cosh(bJ) + 2[cosh(2bB)-1]sinh(bJ) = Z^2 Tr rho^2."""
    if _needs_log_space(raw):
        return float(np.exp(log_f1(raw)))
    b, j = _exponents(raw)
    return 2 * math.cosh(2 * b) * math.exp(j) + 2 * math.exp(-j)


def f2(raw: RawParams) -> float:
    if _needs_log_space(raw):
        return float(np.exp(log_f2(raw)))
    b, _ = _exponents(raw)
    return (f1(raw) + 4 * math.cosh(b)) ** 2


def measure_closed_form_raw(raw: RawParams, log_base: LogBase | None = None) -> float:
    """epsilon = 1/2 log(f1/f2 * Z^2) on raw (beta, B, J); J = 0 is allowed here."""
    if _needs_log_space(raw):
        logger.debug(f"log-space evaluation at beta={raw.beta}, B={raw.field_B}, J={raw.coupling_J}")
        value = 0.5 * (log_f1(raw) - log_f2(raw) + 2.0 * log_partition_fn(raw))
    else:
        value = 0.5 * math.log(f1(raw) / f2(raw) * partition_fn(raw) ** 2)
    return (log_base or Config.LOG_BASE).convert(value)


def measure_closed_form(p: RegisterParams, log_base: LogBase | None = None) -> float:
    return measure_closed_form_raw(to_raw(p), log_base)


# --- Asymptotic regimes ---

def applicable_regimes(coupling: Coupling) -> list[Regime]:
    return [r for r in Regime if r.coupling is Coupling(coupling)]


def _small_field_constant(t: float) -> float:
    u = math.exp(-1.0 / t)
    return 0.5 * math.log(2 * (1 + u * u) / (1 + u) ** 2)


def _large_field(t: float, h: float, sign: int) -> float:
    # r^2 (1 - w^-2) - 4 r^3 w^-1 (1 - w^-2) with r = e^{-h/T}, w = e^{sign/T}
    return (
        math.exp(-2 * h / t) - math.exp(-(2 * h + 2 * sign) / t)
        - 4 * (math.exp(-(3 * h + sign) / t) - math.exp(-(3 * h + 3 * sign) / t))
    )


def _ferro(regime: Regime, t: float, h: float) -> float:
    if regime is Regime.FERRO_LOW_T:
        if h <= 0:
            raise ValidationError("the ferromagnetic low-temperature expansion needs h > 0", invariant="regime")
        x = math.exp(-2 * h / t)
        return x - x ** 2 + x ** 3 / 3
    if regime is Regime.FERRO_SMALL_FIELD:
        u = math.exp(-1.0 / t)
        a2 = (1 - u) * (u * u + 2 * u - 1) / (2 * t * t * (1 + u) ** 2 * (1 + u * u))
        return _small_field_constant(t) + a2 * h * h
    if regime is Regime.FERRO_HIGH_T:
        x = math.expm1(1.0 / t)
        return x ** 2 / 8 + (h * h - 1) / 8 * x ** 3
    return _large_field(t, h, sign=1)


def _antiferro(regime: Regime, t: float, h: float) -> float:
    if regime is Regime.ANTIFERRO_LOW_T:
        if abs(h - 1.0) <= FIELD_MATCH_TOL:
            x = math.exp(-2.0 / t)
            return 0.5 * math.log(27.0 / 25.0) - x / 15 - 2 * x * x / 225
        if h < 1.0:
            return 0.5 * math.log(2.0) - 0.5 * math.exp(-(1 - h) / t)
        return _large_field(t, h, sign=-1)
    if regime is Regime.ANTIFERRO_SMALL_FIELD:
        u = math.exp(-1.0 / t)
        c2 = u * (1 - u) * (u * u - 2 * u - 1) / (2 * t * t * (1 + u) ** 2 * (1 + u * u))
        return _small_field_constant(t) + c2 * h * h
    if regime is Regime.ANTIFERRO_HIGH_T:
        x = math.expm1(1.0 / t)
        return x ** 2 / 8 - (h * h + 1) / 8 * x ** 3
    return _large_field(t, h, sign=-1)


def asymptotic_measure(regime: Regime, p: RegisterParams) -> float:
    """
    Leading asymptotic expansion of epsilon(T, h) in one regime.

    The antiferromagnetic low-temperature regime covers all h: the h < 1
    plateau, the h = 1 branch, and for h > 1 the large-field form, which
    vanishes as T -> 0.

    Args:
        regime (Regime): Expansion to evaluate; must belong to ``p.coupling``.
        p (RegisterParams): Point (T, h).

    Returns:
        float: Natural-log value of the expansion.
    """
    regime = Regime(regime)
    if regime.coupling is not p.coupling:
        raise ValidationError(
            f"regime {regime.value} does not apply to {p.coupling.value} coupling", invariant="regime"
        )
    if p.coupling is Coupling.FERRO:
        return _ferro(regime, p.temperature, p.field)
    return _antiferro(regime, p.temperature, p.field)


def _regime_value(regime: Regime, p: RegisterParams) -> float | None:
    try:
        return asymptotic_measure(regime, p)
    except (ValidationError, OverflowError) as exc:
        logger.debug(f"{regime.value} not evaluated at T={p.temperature}, h={p.field}: {exc}")
        return None


def sweep(
    t_range: GridRange,
    h_range: GridRange,
    coupling: Coupling,
    asymptotics: bool = False,
    log_base: LogBase | None = None,
) -> list[SweepRow]:
    """
    epsilon on a (T, h) grid, T outer and h inner.

    Rows of constant T are evaluated in parallel and assembled in grid order.

    Args:
        t_range (GridRange): Temperatures; every value must be > 0.
        h_range (GridRange): Fields; every value must be >= 0.
        coupling (Coupling): Sign of J.
        asymptotics (bool, optional): Also evaluate every regime expansion of this coupling.
        log_base (LogBase, optional): Base of the closed-form column.

    Returns:
        list[SweepRow]: One row per grid point.
    """
    coupling = Coupling(coupling)
    temperatures, fields = t_range.values(), h_range.values()
    if np.any(temperatures <= 0):
        raise ValidationError("temperature range must be > 0", invariant="range")
    if np.any(fields < 0):
        raise ValidationError("field range must be >= 0", invariant="range")
    regimes = applicable_regimes(coupling) if asymptotics else []

    def row(t: float) -> list[SweepRow]:
        out = []
        for h in fields:
            p = RegisterParams(float(t), float(h), coupling)
            extra = tuple(_regime_value(r, p) for r in regimes)
            out.append(SweepRow(p.temperature, p.field, measure_closed_form(p, log_base), extra))
        return out

    rows = [r for chunk in ordered_map(row, list(temperatures), label="temperature row") for r in chunk]
    logger.info(f"{coupling.value} sweep: {len(temperatures)} x {len(fields)} grid evaluated")
    return rows


def sweep_columns(coupling: Coupling, asymptotics: bool = False) -> Sequence[str]:
    columns = ["T", "h", "epsilon"]
    if asymptotics:
        columns += [r.value for r in applicable_regimes(coupling)]
    return columns
