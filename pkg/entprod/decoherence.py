"""
Bipartite decoherence in the eigenbasis |n alpha> of the full Hamiltonian.

Two evolution modes:
  EXACT   - unitary phases exp(-i w t), w = E_{m a} - E_{n b}.
  LORENTZ - phenomenological damping of the off-diagonal marginal sums by
            exp(-Gamma t); a model for the large-system limit, not a derivation.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from entprod.batch import ordered_map
from entprod.config import Config, LogBase
from entprod.errors import ValidationError
from entprod.hilbert import DenseOperator, DensityOperator, Partition, hs_norm, partial_trace
from entprod.measure import entanglement_production

# Set up logging
logger = logging.getLogger(__name__)

BIPARTITION = Partition(((0,), (1,)))


class EvolutionMode(str, Enum):
    EXACT = "exact"
    LORENTZ = "lorentz"


class TrajectoryPoint(NamedTuple):
    t: float
    epsilon: float


class LimitMeasures(NamedTuple):
    eps0: float
    eps_inf: float


@dataclass(frozen=True, eq=False)
class BipartiteSpec:
    energies: np.ndarray  # E[n, alpha], shape (d_A, d_B)
    rho0: DensityOperator

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        if energies.ndim != 2:
            raise ValidationError("energies must be a (d_A, d_B) array", invariant="layout")
        if self.rho0.layout.dims != energies.shape:
            raise ValidationError(
                f"rho0 layout {list(self.rho0.layout.dims)} does not match energies {list(energies.shape)}",
                invariant="layout",
            )
        object.__setattr__(self, "energies", energies)

    @property
    def dim_A(self) -> int:
        return self.energies.shape[0]

    @property
    def dim_B(self) -> int:
        return self.energies.shape[1]

    def blocks(self) -> np.ndarray:
        """rho0 as R[m, alpha, n, beta]."""
        return self.rho0.matrix.reshape(self.dim_A, self.dim_B, self.dim_A, self.dim_B)


@dataclass(frozen=True, eq=False)
class LorentzSpec:
    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
            raise ValidationError("Lorentz widths must form a square matrix", invariant="layout")
        if np.any(gamma < 0):
            raise ValidationError("Lorentz widths must be >= 0", invariant="gamma")
        if np.any(np.diag(gamma) != 0):
            raise ValidationError("diagonal Lorentz widths must be zero", invariant="gamma")
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def uniform(cls, width: float, dim: int) -> "LorentzSpec":
        gamma = np.full((dim, dim), float(width))
        np.fill_diagonal(gamma, 0.0)
        return cls(gamma)


@dataclass(frozen=True)
class LorentzDamping:
    system: LorentzSpec
    environment: LorentzSpec

    def check(self, spec: BipartiteSpec) -> None:
        if self.system.gamma.shape[0] != spec.dim_A or self.environment.gamma.shape[0] != spec.dim_B:
            raise ValidationError("Lorentz widths do not match the subsystem dimensions", invariant="layout")


def evolve(spec: BipartiteSpec, t: float) -> DensityOperator:
    energies = spec.energies.reshape(-1)
    phases = np.exp(-1j * np.subtract.outer(energies, energies) * t)
    return DensityOperator(DenseOperator(spec.rho0.layout, spec.rho0.matrix * phases), validate=False)


def decoherence_factor_lorentz(l: LorentzSpec, t: float) -> np.ndarray:
    if t < 0:
        raise ValidationError(f"decoherence factors need t >= 0, got {t}", invariant="time")
    return np.exp(-l.gamma * t)


def damped_state(spec: BipartiteSpec, damping: LorentzDamping, t: float) -> DenseOperator:
    """
    rho(0) with every entry scaled by D_A[m, n] * D_B[alpha, beta].

    Its partial traces are exactly the damped marginals, so the marginal norms
    can be read off with the ordinary partial trace.
    """
    damping.check(spec)
    factors = np.kron(decoherence_factor_lorentz(damping.system, t), decoherence_factor_lorentz(damping.environment, t))
    return DenseOperator(spec.rho0.layout, spec.rho0.matrix * factors)


def _marginals0(spec: BipartiteSpec) -> tuple[np.ndarray, np.ndarray]:
    r = spec.blocks()
    return np.einsum("mana->mn", r), np.einsum("nanb->ab", r)


def marginal_norms_lorentz(spec: BipartiteSpec, damping: LorentzDamping, t: float) -> tuple[float, float]:
    """Squared marginal norms: diagonal part plus off-diagonal part damped by |D(t)|^2."""
    damping.check(spec)
    rho_a, rho_b = _marginals0(spec)
    d_a = decoherence_factor_lorentz(damping.system, t)
    d_b = decoherence_factor_lorentz(damping.environment, t)
    return float(np.sum(np.abs(rho_a * d_a) ** 2)), float(np.sum(np.abs(rho_b * d_b) ** 2))


def marginal_purities(spec: BipartiteSpec, t: float) -> tuple[float, float]:
    """Squared marginal norms at time t from the sector sums over the traced index."""
    r, e = spec.blocks(), spec.energies
    same_b = np.einsum("mana->mna", r)
    rho_a = np.sum(same_b * np.exp(-1j * (e[:, None, :] - e[None, :, :]) * t), axis=-1)
    same_a = np.einsum("nanb->abn", r)
    e_t = e.T
    rho_b = np.sum(same_a * np.exp(-1j * (e_t[:, None, :] - e_t[None, :, :]) * t), axis=-1)
    return float(np.sum(np.abs(rho_a) ** 2)), float(np.sum(np.abs(rho_b) ** 2))


def measure_trajectory(
    spec: BipartiteSpec,
    times: Sequence[float],
    mode: EvolutionMode = EvolutionMode.EXACT,
    damping: LorentzDamping | None = None,
    log_base: LogBase | None = None,
) -> list[TrajectoryPoint]:
    """
    epsilon(rho(t)) for the system/environment bipartition.

    Args:
        spec (BipartiteSpec): Energies and initial state.
        times (Sequence[float]): Ascending evaluation times.
        mode (EvolutionMode, optional): Exact phases or Lorentz damping.
        damping (LorentzDamping, optional): Required in Lorentz mode.
        log_base (LogBase, optional): Output base.

    Returns:
        list[TrajectoryPoint]: (t, epsilon) in input order.
    """
    log_base = log_base or Config.LOG_BASE
    mode = EvolutionMode(mode)
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValidationError("trajectory times must be sorted ascending", invariant="time")
    if mode is EvolutionMode.LORENTZ:
        if damping is None:
            raise ValidationError("Lorentz mode needs decoherence widths", invariant="gamma")
        damping.check(spec)
        log_numerator = math.log(hs_norm(spec.rho0))

    def point(t: float) -> TrajectoryPoint:
        if mode is EvolutionMode.EXACT:
            return TrajectoryPoint(t, entanglement_production(evolve(spec, t), BIPARTITION, log_base).epsilon)
        damped = damped_state(spec, damping, t)
        value = log_numerator - math.log(hs_norm(partial_trace(damped, [0]))) - math.log(hs_norm(partial_trace(damped, [1])))
        return TrajectoryPoint(t, log_base.convert(value))

    trajectory = ordered_map(point, times, label="time point")
    logger.info(f"{mode.value} trajectory with {len(trajectory)} points on {spec.dim_A}x{spec.dim_B}")
    return trajectory


def limit_measures(spec: BipartiteSpec, log_base: LogBase | None = None) -> LimitMeasures:
    """
    Initial and infinite-time epsilon straight from the matrix elements of rho(0).

    The t -> infinity value drops every off-diagonal marginal element.
    """
    log_base = log_base or Config.LOG_BASE
    rho_a, rho_b = _marginals0(spec)
    numerator = float(np.sum(np.abs(spec.rho0.matrix) ** 2))
    eps0 = 0.5 * math.log(numerator / (np.sum(np.abs(rho_a) ** 2) * np.sum(np.abs(rho_b) ** 2)))
    eps_inf = 0.5 * math.log(numerator / (np.sum(np.abs(np.diag(rho_a)) ** 2) * np.sum(np.abs(np.diag(rho_b)) ** 2)))
    return LimitMeasures(log_base.convert(eps0), log_base.convert(eps_inf))
