"""
Named states with closed-form entanglement production.

Single-party labels |1>, |2>, ... map to computational indices 0, 1, ...
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from entprod.config import Config, LogBase
from entprod.errors import ValidationError
from entprod.hilbert import DenseOperator, DensityOperator, Partition, SpaceLayout

# Set up logging
logger = logging.getLogger(__name__)


class StateKind(str, Enum):
    EPR = "epr"
    BELL = "bell"
    GHZ = "ghz"
    MULTICAT = "multicat"
    MULTIMODE = "multimode"
    SEPARABLE = "separable"


PURE_KINDS = (StateKind.EPR, StateKind.BELL, StateKind.GHZ, StateKind.MULTICAT, StateKind.MULTIMODE)


@dataclass(frozen=True)
class NamedState:
    """
    Parameters of a named state.

    ``sign`` applies to EPR, Bell and GHZ; ``coeffs`` to Multicat (two entries)
    and Multimode (M entries); ``weights`` to Separable.
    """
    kind: StateKind
    n_parties: int = 2
    sign: int = 1
    coeffs: tuple[complex, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

        if self.n_parties < 2:
            raise ValidationError(f"named states need at least 2 parties, got {self.n_parties}", invariant="parties")
        if self.kind in (StateKind.EPR, StateKind.BELL) and self.n_parties != 2:
            raise ValidationError(f"{self.kind.value} states are two-party states", invariant="parties")
        if self.sign not in (1, -1):
            raise ValidationError(f"sign must be +1 or -1, got {self.sign}", invariant="sign")

        if self.kind is StateKind.MULTICAT and len(self.coeffs) != 2:
            raise ValidationError("multicat states take exactly two coefficients", invariant="normalization")
        if self.kind is StateKind.MULTIMODE and len(self.coeffs) < 1:
            raise ValidationError("multimode states need at least one coefficient", invariant="normalization")
        if self.kind in (StateKind.MULTICAT, StateKind.MULTIMODE):
            total = sum(abs(c) ** 2 for c in self.coeffs)
            if abs(total - 1.0) > Config.NORMALIZATION_TOL:
                raise ValidationError(f"sum |c_n|^2 = {total:.12g}, expected 1", invariant="normalization")

        if self.kind is StateKind.SEPARABLE:
            if not self.weights:
                raise ValidationError("separable states need at least one weight", invariant="normalization")
            if any(w < 0 or w > 1 for w in self.weights):
                raise ValidationError("separable weights must lie in [0, 1]", invariant="normalization")
            if abs(sum(self.weights) - 1.0) > Config.NORMALIZATION_TOL:
                raise ValidationError(f"weights sum to {sum(self.weights):.12g}, expected 1", invariant="normalization")

    @classmethod
    def uniform_multimode(cls, n_parties: int, modes: int) -> "NamedState":
        return cls(StateKind.MULTIMODE, n_parties, coeffs=tuple([1.0 / math.sqrt(modes)] * modes))

    @property
    def local_dim(self) -> int:
        if self.kind is StateKind.MULTIMODE:
            return len(self.coeffs)
        if self.kind is StateKind.SEPARABLE:
            return len(self.weights)
        return 2

    @property
    def layout(self) -> SpaceLayout:
        return SpaceLayout((self.local_dim,) * self.n_parties)


def canonical_partition(spec: NamedState) -> Partition:
    return Partition.singletons(spec.n_parties)


def _basis_index(levels: Sequence[int], local_dim: int) -> int:
    index = 0
    for level in levels:
        index = index * local_dim + level
    return index


def state_vector(spec: NamedState) -> np.ndarray:
    """Amplitudes of a pure named state in the computational basis."""
    if spec.kind not in PURE_KINDS:
        raise ValidationError(f"{spec.kind.value} states are mixed", invariant="kind")
    n, d = spec.n_parties, spec.local_dim
    psi = np.zeros(d ** n, dtype=complex)

    if spec.kind is StateKind.EPR:
        psi[_basis_index([0, 1], d)] = 1.0
        psi[_basis_index([1, 0], d)] = spec.sign
        return psi / math.sqrt(2.0)
    if spec.kind in (StateKind.BELL, StateKind.GHZ):
        psi[_basis_index([0] * n, d)] = 1.0
        psi[_basis_index([1] * n, d)] = spec.sign
        return psi / math.sqrt(2.0)

    # Multicat and multimode: sum_k c_k |k k ... k>
    for k, c in enumerate(spec.coeffs):
        psi[_basis_index([k] * n, d)] = c
    return psi


def build(spec: NamedState) -> tuple[DensityOperator, Partition]:
    """
    Density operator of a named state with its one-block-per-party partition.

    Args:
        spec (NamedState): Validated state parameters.

    Returns:
        tuple[DensityOperator, Partition]: The state and its canonical partition.
    """
    layout = spec.layout
    if spec.kind in PURE_KINDS:
        rho = DensityOperator.from_vector(state_vector(spec), layout)
    else:
        # sum_k p_k |k><k| on every party, with |n_ik> = |k>
        diag = np.zeros(layout.total_dim)
        for k, weight in enumerate(spec.weights):
            diag[_basis_index([k] * spec.n_parties, spec.local_dim)] = weight
        rho = DensityOperator(DenseOperator(layout, np.diag(diag)))
    logger.debug(f"built {spec.kind.value} state on {list(layout.dims)}")
    return rho, canonical_partition(spec)


def closed_form_measure(spec: NamedState, log_base: LogBase | None = None) -> float:
    n = spec.n_parties
    if spec.kind in (StateKind.EPR, StateKind.BELL):
        value = math.log(2.0)
    elif spec.kind is StateKind.GHZ:
        value = 0.5 * n * math.log(2.0)
    elif spec.kind in (StateKind.MULTICAT, StateKind.MULTIMODE):
        value = -0.5 * n * math.log(sum(abs(c) ** 4 for c in spec.coeffs))
    else:
        value = -0.5 * (n - 1) * math.log(sum(w ** 2 for w in spec.weights))
    return (log_base or Config.LOG_BASE).convert(value)
