"""
Multiparticle spinor systems: Young-diagram dimensions, the spin-spatial
measure ln f_lambda, the particle-partition closed form for two-orbital
spin-1/2 bosons, and a brute-force oracle for both.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

import numpy as np
from scipy import linalg
from scipy.special import entr, gammaln

from entprod.batch import ordered_map
from entprod.config import Config, LogBase
from entprod.errors import OracleError, ValidationError
from entprod.hilbert import Partition, SpaceLayout
from entprod.measure import pure_state_measure

# Set up logging
logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-8


@dataclass(frozen=True)
class YoungDiagram:
    """Row lengths lambda_1 >= ... >= lambda_k >= 1; ``multiplicity`` M >= k is the nominal row count."""
    rows: tuple[int, ...]
    multiplicity: int | None = None

    def __post_init__(self):
        rows = [int(r) for r in self.rows]
        if any(r < 0 for r in rows):
            raise ValidationError(f"row lengths must be >= 0, got {rows}", invariant="diagram")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValidationError(f"row lengths must be non-increasing, got {rows}", invariant="diagram")
        nominal = len(rows) if self.multiplicity is None else int(self.multiplicity)
        rows = tuple(r for r in rows if r > 0)
        if not rows:
            raise ValidationError("a Young diagram needs at least one box", invariant="diagram")
        if nominal < len(rows):
            raise ValidationError(f"multiplicity {nominal} is below the row count {len(rows)}", invariant="diagram")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "multiplicity", nominal)

    @property
    def n_total(self) -> int:
        return sum(self.rows)

    def padded(self) -> list[int]:
        return list(self.rows) + [0] * (self.multiplicity - len(self.rows))

    def conjugate(self) -> tuple[int, ...]:
        return tuple(sum(1 for r in self.rows if r > j) for j in range(self.rows[0]))


def _half_integer(value, name: str) -> Fraction:
    frac = Fraction(value)
    if (2 * frac).denominator != 1:
        raise ValidationError(f"{name} must be an integer or half-integer, got {value}", invariant="quantum_numbers")
    return frac


@dataclass(frozen=True)
class SpinHalfState:
    n_particles: int
    total_spin: Fraction
    s_z: Fraction = Fraction(0)
    i_z: Fraction = Fraction(0)

    def __post_init__(self):
        n = int(self.n_particles)
        s = _half_integer(self.total_spin, "S")
        s_z = _half_integer(self.s_z, "S_z")
        i_z = _half_integer(self.i_z, "I_z")
        if n < 1:
            raise ValidationError(f"need at least one particle, got {n}", invariant="quantum_numbers")
        half_n = Fraction(n, 2)
        if s < 0 or s > half_n or (half_n - s).denominator != 1:
            raise ValidationError(f"S = {s} is not allowed for N = {n}", invariant="quantum_numbers")
        for name, proj in (("S_z", s_z), ("I_z", i_z)):
            if abs(proj) > s or (s - proj).denominator != 1:
                raise ValidationError(f"{name} = {proj} is not allowed for S = {s}", invariant="quantum_numbers")
        object.__setattr__(self, "n_particles", n)
        object.__setattr__(self, "total_spin", s)
        object.__setattr__(self, "s_z", s_z)
        object.__setattr__(self, "i_z", i_z)

    @property
    def diagram(self) -> YoungDiagram:
        half_n = Fraction(self.n_particles, 2)
        return YoungDiagram((int(half_n + self.total_spin), int(half_n - self.total_spin)), multiplicity=2)


def valid_states(n_particles: int) -> list[SpinHalfState]:
    """Every (S, S_z, I_z) triple for N spin-1/2 particles, S ascending."""
    states = []
    half_n = Fraction(n_particles, 2)
    s = half_n - int(half_n)
    while s <= half_n:
        projections = [s - k for k in range(int(2 * s) + 1)]
        for s_z, i_z in product(projections, repeat=2):
            states.append(SpinHalfState(n_particles, s, s_z, i_z))
        s += 1
    return states


# --- Representation dimensions ---

def rep_dimension(d: YoungDiagram) -> int:
    """
    Dimension of the symmetric-group irrep labelled by ``d``.

    f = N! prod_{m<m'} (l_m - m - l_m' + m') / prod_m (l_m + M - m)!, exact in integers.
    """
    rows = d.padded()
    m_rows = d.multiplicity
    numerator = math.factorial(d.n_total)
    for a in range(m_rows):
        for b in range(a + 1, m_rows):
            numerator *= rows[a] - rows[b] + b - a
    denominator = 1
    for a in range(m_rows):
        denominator *= math.factorial(rows[a] + m_rows - a - 1)
    return numerator // denominator


def log_rep_dimension(d: YoungDiagram) -> float:
    """ln f_lambda; exact integers up to Config.EXACT_FACTORIAL_LIMIT boxes, gammaln above."""
    if d.n_total <= Config.EXACT_FACTORIAL_LIMIT:
        return math.log(rep_dimension(d))
    rows = d.padded()
    m_rows = d.multiplicity
    value = float(gammaln(d.n_total + 1))
    for a in range(m_rows):
        for b in range(a + 1, m_rows):
            value += math.log(rows[a] - rows[b] + b - a)
        value -= float(gammaln(rows[a] + m_rows - a))
    return value


def hook_length_dimension(d: YoungDiagram) -> int:
    conj = d.conjugate()
    hooks = 1
    for i, row in enumerate(d.rows):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(d.n_total) // hooks


def standard_tableaux(d: YoungDiagram) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yields every standard Young tableau of shape ``d`` (entries 1..N)."""
    rows = list(d.rows)
    n = sum(rows)
    if n == 1:
        yield ((1,),)
        return
    for i, row in enumerate(rows):
        # n sits in a removable corner
        if i + 1 < len(rows) and rows[i + 1] == row:
            continue
        smaller = rows.copy()
        smaller[i] -= 1
        if smaller[i] == 0:
            smaller.pop()
            for tableau in standard_tableaux(YoungDiagram(tuple(smaller))):
                yield tableau + ((n,),)
        else:
            for tableau in standard_tableaux(YoungDiagram(tuple(smaller))):
                yield tableau[:i] + (tableau[i] + (n,),) + tableau[i + 1:]


def rep_dimension_spin_half(state: SpinHalfState) -> int:
    """f = N! (2S+1) / ((N/2+S+1)! (N/2-S)!)."""
    n = state.n_particles
    upper = int(Fraction(n, 2) + state.total_spin)
    lower = int(Fraction(n, 2) - state.total_spin)
    return math.factorial(n) * (upper - lower + 1) // (math.factorial(upper + 1) * math.factorial(lower))


# --- Measures ---

def spin_spatial_measure(d: YoungDiagram, log_base: LogBase | None = None) -> float:
    """ln f_lambda, converted to log_base; the natural-log value is the default."""
    return (log_base or Config.LOG_BASE).convert(log_rep_dimension(d))


def spin_spatial_asymptotic(d: YoungDiagram, log_base: LogBase | None = None) -> float:
    """N ln N - sum_m l_m ln l_m, with 0 ln 0 = 0."""
    n = d.n_total
    fractions = np.array(d.padded(), dtype=float) / n
    return (log_base or Config.LOG_BASE).convert(float(n * np.sum(entr(fractions))))


def particle_measure(state: SpinHalfState, log_base: LogBase | None = None) -> float:
    """
    epsilon for the single-particle partition of a symmetric two-orbital state.

    The argument of the logarithm is evaluated exactly in rationals, so the
    fully polarized state gives exactly 0.
    """
    n = state.n_particles
    s, s_z, i_z = state.total_spin, state.s_z, state.i_z
    bracket = s_z ** 2 + i_z ** 2
    if s != 0:
        bracket += Fraction((n + 2) ** 2) / (4 * s ** 2 * (s + 1) ** 2) * s_z ** 2 * i_z ** 2
    argument = Fraction(1, 4) + bracket / n ** 2
    if argument == 1:
        return 0.0
    return (log_base or Config.LOG_BASE).convert(-0.5 * n * math.log(float(argument)))


# --- Brute-force oracle ---

def _arrangements(counts: list[int]) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of a multiset given by per-mode counts."""
    total = sum(counts)
    if total == 0:
        yield ()
        return
    for mode, count in enumerate(counts):
        if count:
            counts[mode] -= 1
            for rest in _arrangements(counts):
                yield (mode,) + rest
            counts[mode] += 1


def _occupations(state: SpinHalfState) -> list[tuple[int, int, int, int]]:
    # modes: 0 = (+, up), 1 = (+, down), 2 = (-, up), 3 = (-, down)
    n = state.n_particles
    found = []
    for n0 in range(n + 1):
        for n1 in range(n + 1 - n0):
            for n2 in range(n + 1 - n0 - n1):
                n3 = n - n0 - n1 - n2
                if Fraction(n0 + n2 - n1 - n3, 2) == state.s_z and Fraction(n0 + n1 - n2 - n3, 2) == state.i_z:
                    found.append((n0, n1, n2, n3))
    return found


def _symmetric_vector(occupation: Sequence[int], n: int) -> np.ndarray:
    # factor order: orbital_0, spin_0, orbital_1, spin_1, ...; mode = 2*orbital + spin
    indices = [sum(mode * 4 ** (n - 1 - j) for j, mode in enumerate(arr)) for arr in _arrangements(list(occupation))]
    vector = np.zeros(4 ** n)
    vector[indices] = 1.0 / math.sqrt(len(indices))
    return vector


def _casimir(vector: np.ndarray, n: int, offset: int) -> np.ndarray:
    """Total (iso)spin squared via sum_{i<j} P_ij + 3N/4 - N(N-1)/4; offset 1 = spin, 0 = orbital."""
    tensor = vector.reshape((2,) * (2 * n))
    result = (0.75 * n - 0.25 * n * (n - 1)) * vector
    for i in range(n):
        for j in range(i + 1, n):
            result = result + np.swapaxes(tensor, 2 * i + offset, 2 * j + offset).reshape(-1)
    return result


def _eigenspace(matrix: np.ndarray, value: float) -> np.ndarray:
    w, v = linalg.eigh(matrix)
    return v[:, np.abs(w - value) <= EIGEN_TOL]


def oracle_state(state: SpinHalfState) -> tuple[np.ndarray, SpaceLayout]:
    """
    The symmetric joint eigenvector of S^2, S_z, I^2, I_z in the 4^N product space.

    Raises:
        ValidationError: N above Config.ORACLE_MAX_PARTICLES.
        OracleError: The joint eigenspace is empty or not one-dimensional.
    """
    n = state.n_particles
    if n > Config.ORACLE_MAX_PARTICLES:
        raise ValidationError(f"oracle supports N <= {Config.ORACLE_MAX_PARTICLES}, got {n}", invariant="oracle")
    basis = np.column_stack([_symmetric_vector(occ, n) for occ in _occupations(state)])
    target = float(state.total_spin * (state.total_spin + 1))

    spin_sq = basis.T @ np.column_stack([_casimir(basis[:, k], n, 1) for k in range(basis.shape[1])])
    spin_space = basis @ _eigenspace(spin_sq, target)
    if spin_space.shape[1] == 0:
        raise OracleError(f"no symmetric state with S = {state.total_spin}, S_z = {state.s_z}, I_z = {state.i_z}")
    iso_sq = spin_space.T @ np.column_stack([_casimir(spin_space[:, k], n, 0) for k in range(spin_space.shape[1])])
    joint = _eigenspace(iso_sq, target)
    if joint.shape[1] != 1:
        raise OracleError(f"joint eigenspace has dimension {joint.shape[1]} for {state}")
    psi = spin_space @ joint[:, 0]
    return psi / np.linalg.norm(psi), SpaceLayout((2,) * (2 * n))


def brute_force_particle_measure(state: SpinHalfState, log_base: LogBase | None = None) -> float:
    psi, layout = oracle_state(state)
    n = state.n_particles
    particles = Partition(tuple((2 * j, 2 * j + 1) for j in range(n)))
    return pure_state_measure(psi, layout, particles, log_base).epsilon


def brute_force_spin_spatial_measure(state: SpinHalfState, log_base: LogBase | None = None) -> float:
    psi, layout = oracle_state(state)
    n = state.n_particles
    orbital_spin = Partition((tuple(range(0, 2 * n, 2)), tuple(range(1, 2 * n, 2))))
    return pure_state_measure(psi, layout, orbital_spin, log_base).epsilon


# --- Tables ---

@dataclass(frozen=True)
class SpinSpatialRow:
    n: int
    s: Fraction
    epsilon: float
    asymptotic: float | None = None


@dataclass(frozen=True)
class ParticleRow:
    n: int
    s: Fraction
    s_z: Fraction
    i_z: Fraction
    epsilon: float
    oracle: float | None = None


def spin_spatial_table(n_particles: int, asymptotic: bool = False, log_base: LogBase | None = None) -> list[SpinSpatialRow]:
    rows = []
    for state in valid_states(n_particles):
        if state.s_z != state.total_spin or state.i_z != state.total_spin:
            continue
        d = state.diagram
        rows.append(SpinSpatialRow(
            n_particles,
            state.total_spin,
            spin_spatial_measure(d, log_base),
            spin_spatial_asymptotic(d, log_base) if asymptotic else None,
        ))
    return rows


def _oracle_or_none(state: SpinHalfState, log_base: LogBase | None) -> float | None:
    try:
        return brute_force_particle_measure(state, log_base)
    except OracleError as exc:
        logger.warning(f"oracle skipped: {exc}")
        return None


def particle_table(
    n_particles: int, oracle: bool = False, log_base: LogBase | None = None
) -> list[ParticleRow]:
    """
    Particle-partition measure for every valid (S, S_z, I_z) at fixed N.

    Args:
        n_particles (int): Particle number.
        oracle (bool, optional): Also run the brute-force oracle (evaluated in parallel).
        log_base (LogBase, optional): Output base.

    Returns:
        list[ParticleRow]: Rows with S ascending, then S_z and I_z descending.
    """
    states = valid_states(n_particles)
    if oracle:
        oracle_values = ordered_map(lambda st: _oracle_or_none(st, log_base), states, label="oracle state")
    else:
        oracle_values = [None] * len(states)
    rows = [
        ParticleRow(n_particles, st.total_spin, st.s_z, st.i_z, particle_measure(st, log_base), value)
        for st, value in zip(states, oracle_values)
    ]
    logger.info(f"particle table for N={n_particles}: {len(rows)} states")
    return rows
