"""
Dense operator algebra on tensor-product Hilbert spaces.

Basis convention: multi-indices are mixed-radix, row-major, with the LAST
factor varying fastest. This is the ordering produced by ``numpy.kron`` and
by reshaping a flat index into ``layout.dims``.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import linalg
from scipy.special import entr

from entprod.config import Config, LogBase
from entprod.errors import ValidationError

# Set up logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpaceLayout:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValidationError("layout needs at least one factor", invariant="layout")
        if any(d < 1 for d in dims):
            raise ValidationError(f"factor dimensions must be >= 1, got {list(dims)}", invariant="layout")
        object.__setattr__(self, "dims", dims)

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def sub_layout(self, indices: Iterable[int]) -> "SpaceLayout":
        return SpaceLayout(tuple(self.dims[i] for i in indices))


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of factor indices. Indices inside a block are kept sorted."""
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in block)) for block in self.blocks)
        if not blocks:
            raise ValidationError("partition needs at least one block", invariant="partition")
        if any(len(block) == 0 for block in blocks):
            raise ValidationError("partition blocks must be non-empty", invariant="partition")
        flat = [i for block in blocks for i in block]
        if len(flat) != len(set(flat)):
            raise ValidationError(f"partition blocks overlap: {[list(b) for b in blocks]}", invariant="partition")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def singletons(cls, n_factors: int) -> "Partition":
        return cls(tuple((i,) for i in range(n_factors)))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def validate_for(self, layout: SpaceLayout) -> None:
        covered = sorted(i for block in self.blocks for i in block)
        if covered != list(range(layout.n_factors)):
            raise ValidationError(
                f"partition {[list(b) for b in self.blocks]} does not cover factors 0..{layout.n_factors - 1}",
                invariant="partition",
            )

    def concatenate(self, other: "Partition", offset: int) -> "Partition":
        """Blocks of self followed by the blocks of other shifted by ``offset``."""
        shifted = tuple(tuple(i + offset for i in block) for block in other.blocks)
        return Partition(self.blocks + shifted)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    layout: SpaceLayout
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        side = self.layout.total_dim
        if matrix.shape != (side, side):
            raise ValidationError(
                f"matrix shape {matrix.shape} does not match layout dimension {side}", invariant="layout"
            )
        object.__setattr__(self, "matrix", matrix)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def is_hermitian(m: np.ndarray) -> bool:
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return True
    return bool(np.max(np.abs(m - m.conj().T)) <= Config.HERMITIAN_TOL * scale)


def validate_density(op: DenseOperator) -> dict[str, bool]:
    """
    Checks the density-operator invariants without raising.

    Args:
        op (DenseOperator): Operator to check.

    Returns:
        dict[str, bool]: Flags ``hermitian``, ``trace`` and ``psd``.
    """
    m = op.matrix
    hermitian = is_hermitian(m)
    trace_ok = abs(np.trace(m) - 1.0) <= Config.TRACE_TOL
    eigenvalues = linalg.eigvalsh(0.5 * (m + m.conj().T))
    psd = bool(eigenvalues.min() >= -Config.PSD_TOL)
    return {"hermitian": hermitian, "trace": bool(trace_ok), "psd": psd}


class DensityOperator:
    """A DenseOperator that has passed the density-operator checks."""

    def __init__(self, op: DenseOperator, *, validate: bool = True):
        if validate:
            flags = validate_density(op)
            for invariant in ("hermitian", "trace", "psd"):
                if not flags[invariant]:
                    raise ValidationError(f"not a density operator: {invariant} check failed", invariant=invariant)
        self.op = op

    @property
    def layout(self) -> SpaceLayout:
        return self.op.layout

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @classmethod
    def from_vector(cls, psi: np.ndarray, layout: SpaceLayout) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(DenseOperator(layout, np.outer(psi, psi.conj())))


OperatorLike = Union[DenseOperator, DensityOperator]


def as_operator(a: OperatorLike) -> DenseOperator:
    return a.op if isinstance(a, DensityOperator) else a


def tensor_product(a: OperatorLike, b: OperatorLike) -> DenseOperator:
    a, b = as_operator(a), as_operator(b)
    return DenseOperator(SpaceLayout(a.layout.dims + b.layout.dims), np.kron(a.matrix, b.matrix))


def partial_trace(a: OperatorLike, keep: Iterable[int]) -> DenseOperator:
    """
    Traces out every factor not in ``keep``.

    Args:
        a (DenseOperator | DensityOperator): Operator on the full layout.
        keep (Iterable[int]): Factor indices to keep; the output orders them ascending.

    Returns:
        DenseOperator: The reduced operator on the kept sub-layout.
    """
    a = as_operator(a)
    n = a.layout.n_factors
    keep = sorted(set(int(i) for i in keep))
    if not keep:
        raise ValidationError("partial trace needs a non-empty keep set", invariant="partition")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValidationError(f"keep indices {keep} out of range for {n} factors", invariant="partition")

    if len(keep) == n:
        return a
    tensor = a.matrix.reshape(a.layout.dims + a.layout.dims)
    rows = list(range(n))
    cols = [n + i if i in keep else i for i in range(n)]
    out = keep + [n + i for i in keep]
    reduced = np.einsum(tensor, rows + cols, out)
    sub = a.layout.sub_layout(keep)
    return DenseOperator(sub, reduced.reshape(sub.total_dim, sub.total_dim))


def permute_factors(a: OperatorLike, order: Sequence[int]) -> DenseOperator:
    """Reorders tensor factors: new factor k is old factor ``order[k]``."""
    a = as_operator(a)
    n = a.layout.n_factors
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValidationError(f"{order} is not a permutation of 0..{n - 1}", invariant="partition")
    tensor = a.matrix.reshape(a.layout.dims + a.layout.dims)
    permuted = tensor.transpose(order + [n + i for i in order])
    layout = a.layout.sub_layout(order)
    return DenseOperator(layout, permuted.reshape(layout.total_dim, layout.total_dim))


def embed_blocks(ops: Sequence[OperatorLike], p: Partition, layout: SpaceLayout) -> DenseOperator:
    """Tensor product of per-block operators placed back on the original factor order."""
    if len(ops) != p.n_blocks:
        raise ValidationError(f"{len(ops)} block operators for {p.n_blocks} blocks", invariant="partition")
    product = as_operator(ops[0])
    for op in ops[1:]:
        product = tensor_product(product, op)
    concat = [i for block in p.blocks for i in block]
    embedded = permute_factors(product, list(np.argsort(concat)))
    if embedded.layout != layout:
        raise ValidationError("block operators do not match the layout", invariant="layout")
    return embedded


def hs_norm(a: OperatorLike) -> float:
    return float(np.linalg.norm(as_operator(a).matrix))


def purity(rho: OperatorLike) -> float:
    m = as_operator(rho).matrix
    return float(np.vdot(m, m).real)


def linear_entropy(rho: OperatorLike) -> float:
    return 1.0 - purity(rho)


def renyi2(rho: OperatorLike, log_base: LogBase | None = None) -> float:
    return (log_base or Config.LOG_BASE).convert(-np.log(purity(rho)))


def renyi_entropy(rho: OperatorLike, alpha: float, log_base: LogBase | None = None) -> float:
    """Rényi entropy of order ``alpha`` (alpha > 0, alpha != 1)."""
    if alpha <= 0 or alpha == 1:
        raise ValidationError(f"Rényi order must be positive and != 1, got {alpha}", invariant="alpha")
    if alpha == 2:
        return renyi2(rho, log_base)
    eigenvalues = np.clip(linalg.eigvalsh(as_operator(rho).matrix), 0.0, None)
    value = np.log(np.sum(eigenvalues ** alpha)) / (1.0 - alpha)
    return (log_base or Config.LOG_BASE).convert(float(value))


def von_neumann_entropy(rho: OperatorLike, log_base: LogBase | None = None) -> float:
    eigenvalues = np.clip(linalg.eigvalsh(as_operator(rho).matrix), 0.0, None)
    return (log_base or Config.LOG_BASE).convert(float(np.sum(entr(eigenvalues))))


def _degenerate_groups(energies: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(energies, kind="stable")
    spread = float(energies.max() - energies.min()) if energies.size else 0.0
    tol = Config.DEGENERACY_FACTOR * spread
    groups, current = [], [order[0]]
    for prev, idx in zip(order[:-1], order[1:]):
        if energies[idx] - energies[prev] <= tol:
            current.append(idx)
        else:
            groups.append(np.array(current))
            current = [idx]
    groups.append(np.array(current))
    return groups


def ipr(rho: OperatorLike, energies: Sequence[float]) -> float:
    """
    Inverse participation ratio in the energy eigenbasis.

    Energies closer than the degeneracy tolerance are chained into groups;
    every cross term inside a group survives.

    Args:
        rho (DensityOperator): State expressed in the basis indexed by ``energies``.
        energies (Sequence[float]): One energy per basis state.

    Returns:
        float: The sum of rho_mn * rho_nm over degenerate pairs.
    """
    m = as_operator(rho).matrix
    energies = np.asarray(energies, dtype=float).reshape(-1)
    if energies.size != m.shape[0]:
        raise ValidationError(f"{energies.size} energies for dimension {m.shape[0]}", invariant="layout")
    total = 0.0
    for group in _degenerate_groups(energies):
        block = m[np.ix_(group, group)]
        total += float(np.sum(block * block.T).real)
    return total


def coherence2(rho: OperatorLike) -> float:
    m = as_operator(rho).matrix
    return purity(rho) - float(np.sum(np.abs(np.diag(m)) ** 2))


def hermitian_exp(h: OperatorLike, scale: float) -> DenseOperator:
    """exp(scale * h) through the Hermitian eigendecomposition."""
    h = as_operator(h)
    if not is_hermitian(h.matrix):
        raise ValidationError("matrix exponential needs a Hermitian generator", invariant="hermitian")
    w, v = linalg.eigh(0.5 * (h.matrix + h.matrix.conj().T))
    return DenseOperator(h.layout, (v * np.exp(scale * w)) @ v.conj().T)
