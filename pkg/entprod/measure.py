"""
Entanglement-production measure of trace-class operators.

epsilon(A) = log ||A|| / ||A_prod|| where A_prod is the tensor product of the
block-reduced operators rescaled to the trace of A. Everything is evaluated
in log space; epsilon is never clamped.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import linalg

from entprod.batch import ordered_map
from entprod.config import Config, LogBase
from entprod.errors import ImpossibleOutcomeError, ValidationError, ZeroTraceError
from entprod.hilbert import (
    DenseOperator,
    DensityOperator,
    OperatorLike,
    Partition,
    SpaceLayout,
    as_operator,
    embed_blocks,
    hs_norm,
    is_hermitian,
    linear_entropy,
    partial_trace,
    purity,
    renyi2,
)

# Set up logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasureReport:
    epsilon: float
    norm_numerator: float
    norm_denominator: float
    per_block_norms: tuple[float, ...] = field(default_factory=tuple)
    log_base: LogBase = LogBase.NATURAL

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "log_base": self.log_base.value,
            "norms": {"numerator": self.norm_numerator, "denominator": self.norm_denominator},
            "per_block_norms": list(self.per_block_norms),
        }


@dataclass(frozen=True)
class OutcomeMeasure:
    probability: float
    report: MeasureReport | None


class RenyiDecomposition(NamedTuple):
    h2_total: float
    h2_product: float
    epsilon: float


class GibbsQuantities(NamedTuple):
    """Natural logs of Z = Tr e^{-bH}, f1 = Tr e^{-2bH} and f2 = prod_i ||Tr_{others} e^{-bH}||^2."""
    log_z: float
    log_f1: float
    log_f2: float
    log_block_norms: tuple[float, ...]


def _checked_trace(a: DenseOperator, p: Partition) -> complex:
    p.validate_for(a.layout)
    trace = a.trace()
    if abs(trace) <= Config.TRACE_ZERO_TOL:
        raise ZeroTraceError(trace)
    return trace


def nonentangling_counterpart(a: OperatorLike, p: Partition) -> DenseOperator:
    """
    Builds the nonentangling counterpart of ``a`` for partition ``p``.

    Args:
        a (DenseOperator | DensityOperator): Trace-class operator.
        p (Partition): Blocks of factor indices.

    Returns:
        DenseOperator: Tensor product of the block marginals divided by (Tr a)^(N-1).
    """
    a = as_operator(a)
    trace = _checked_trace(a, p)
    marginals = [partial_trace(a, block) for block in p.blocks]
    product = embed_blocks(marginals, p, a.layout)
    return DenseOperator(a.layout, product.matrix / trace ** (p.n_blocks - 1))


def entanglement_production(a: OperatorLike, p: Partition, log_base: LogBase | None = None) -> MeasureReport:
    """
    Computes epsilon for any trace-class operator.

    The denominator uses ||A_prod|| = prod_i ||A_i|| / |Tr A|^(N-1), so the
    product operator is never formed.

    Args:
        a (DenseOperator | DensityOperator): Operator; Hermiticity is not required.
        p (Partition): Blocks of factor indices.
        log_base (LogBase, optional): Output base. Defaults to Config.LOG_BASE.

    Returns:
        MeasureReport: epsilon with the norms it was built from.
    """
    log_base = log_base or Config.LOG_BASE
    a = as_operator(a)
    trace = _checked_trace(a, p)

    block_norms = tuple(hs_norm(partial_trace(a, block)) for block in p.blocks)
    log_numerator = math.log(hs_norm(a))
    log_denominator = sum(math.log(n) for n in block_norms) - (p.n_blocks - 1) * math.log(abs(trace))
    epsilon = log_numerator - log_denominator

    return MeasureReport(
        epsilon=log_base.convert(epsilon),
        norm_numerator=math.exp(log_numerator),
        norm_denominator=math.exp(log_denominator),
        per_block_norms=block_norms,
        log_base=log_base,
    )


def product_purity(rho: OperatorLike, p: Partition) -> float:
    """Purity of the nonentangling counterpart: the product of the block purities."""
    p.validate_for(as_operator(rho).layout)
    return float(np.prod([purity(partial_trace(rho, block)) for block in p.blocks]))


def linear_entropy_form(rho: OperatorLike, p: Partition, log_base: LogBase | None = None) -> float:
    """epsilon written through linear entropies: 1/2 log (1 - S_L(rho)) / prod_i (1 - S_L(rho_i))."""
    p.validate_for(as_operator(rho).layout)
    ratio = (1.0 - linear_entropy(rho)) / np.prod([1.0 - linear_entropy(partial_trace(rho, b)) for b in p.blocks])
    return (log_base or Config.LOG_BASE).convert(0.5 * math.log(ratio))


def _block_gram(tensor: np.ndarray, block: Sequence[int]) -> np.ndarray:
    rest = [i for i in range(tensor.ndim) if i not in block]
    d_block = int(np.prod([tensor.shape[i] for i in block]))
    m = tensor.transpose(list(block) + rest).reshape(d_block, -1)
    # Same nonzero spectrum either way; take the smaller Gram matrix.
    return m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m


def pure_state_measure(
    psi: np.ndarray, layout: SpaceLayout, p: Partition, log_base: LogBase | None = None
) -> MeasureReport:
    """
    epsilon of the projector |psi><psi| from reshaped Gram matrices of psi.

    Args:
        psi (np.ndarray): Normalized state vector of length layout.total_dim.
        layout (SpaceLayout): Factor dimensions.
        p (Partition): Blocks of factor indices.
        log_base (LogBase, optional): Output base.

    Returns:
        MeasureReport: Same value as entanglement_production on the projector.
    """
    log_base = log_base or Config.LOG_BASE
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != layout.total_dim:
        raise ValidationError(f"state has {psi.size} amplitudes, layout needs {layout.total_dim}", invariant="layout")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > Config.NORMALIZATION_TOL:
        raise ValidationError(f"state vector is not normalized (||psi|| = {norm:.12g})", invariant="normalization")
    p.validate_for(layout)

    tensor = psi.reshape(layout.dims)
    grams = [_block_gram(tensor, block) for block in p.blocks]
    block_purities = [float(np.vdot(g, g).real) for g in grams]
    epsilon = -0.5 * sum(math.log(g) for g in block_purities)
    block_norms = tuple(math.sqrt(g) for g in block_purities)
    return MeasureReport(
        epsilon=log_base.convert(epsilon),
        norm_numerator=norm ** 2,
        norm_denominator=float(np.prod(block_norms)),
        per_block_norms=block_norms,
        log_base=log_base,
    )


def renyi_decomposition(rho: DensityOperator, p: Partition, log_base: LogBase | None = None) -> RenyiDecomposition:
    p.validate_for(rho.layout)
    h2_total = renyi2(rho, log_base)
    h2_product = sum(renyi2(partial_trace(rho, block), log_base) for block in p.blocks)
    return RenyiDecomposition(h2_total, h2_product, 0.5 * (h2_product - h2_total))


def gibbs_quantities(h: OperatorLike, beta: float, p: Partition) -> GibbsQuantities:
    """
    Log-space Z, f1 and f2 of e^{-beta H}.

    The spectrum is shifted by its minimum before exponentiating; the shift
    is added back analytically, so large beta does not overflow.
    """
    h = as_operator(h)
    if beta < 0:
        raise ValidationError(f"inverse temperature must be >= 0, got {beta}", invariant="beta")
    if not is_hermitian(h.matrix):
        raise ValidationError("Gibbs state needs a Hermitian Hamiltonian", invariant="hermitian")
    p.validate_for(h.layout)

    w, v = linalg.eigh(0.5 * (h.matrix + h.matrix.conj().T))
    shift = float(w.min())
    weights = np.exp(-beta * (w - shift))
    shifted = DenseOperator(h.layout, (v * weights) @ v.conj().T)

    log_z = -beta * shift + math.log(weights.sum())
    log_f1 = -2.0 * beta * shift + math.log(np.sum(weights ** 2))
    log_block_norms = tuple(math.log(hs_norm(partial_trace(shifted, block))) - beta * shift for block in p.blocks)
    log_f2 = 2.0 * sum(log_block_norms)
    return GibbsQuantities(log_z, log_f1, log_f2, log_block_norms)


def gibbs_measure(h: OperatorLike, beta: float, p: Partition, log_base: LogBase | None = None) -> MeasureReport:
    """epsilon of e^{-beta H}/Z as 1/2 log(f1/f2 * Z^(2N-2))."""
    log_base = log_base or Config.LOG_BASE
    q = gibbs_quantities(h, beta, p)
    n = p.n_blocks
    epsilon = 0.5 * (q.log_f1 - q.log_f2 + (2 * n - 2) * q.log_z)
    block_norms = tuple(math.exp(log_norm - q.log_z) for log_norm in q.log_block_norms)
    return MeasureReport(
        epsilon=log_base.convert(epsilon),
        norm_numerator=math.exp(0.5 * q.log_f1 - q.log_z),
        norm_denominator=float(np.prod(block_norms)),
        per_block_norms=block_norms,
        log_base=log_base,
    )


def _check_projector(projector: DenseOperator, layout: SpaceLayout) -> None:
    if projector.layout != layout:
        raise ValidationError("projector layout does not match the state", invariant="layout")
    m = projector.matrix
    if not is_hermitian(m):
        raise ValidationError("projector is not Hermitian", invariant="hermitian")
    if np.max(np.abs(m @ m - m)) > Config.HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
        raise ValidationError("projector is not idempotent", invariant="idempotent")


def measurement_reduce(rho: DensityOperator, projector: DenseOperator) -> DensityOperator:
    """
    Post-measurement state P rho P / Tr(rho P).

    Raises:
        ImpossibleOutcomeError: Tr(rho P) is at or below the outcome threshold.
    """
    _check_projector(projector, rho.layout)
    p_mat = projector.matrix
    probability = float(np.trace(rho.matrix @ p_mat).real)
    if probability <= Config.OUTCOME_TOL:
        raise ImpossibleOutcomeError(probability)
    reduced = p_mat @ rho.matrix @ p_mat / probability
    return DensityOperator(DenseOperator(rho.layout, reduced), validate=False)


def post_measurement_measures(
    rho: DensityOperator, projectors: Sequence[DenseOperator], p: Partition, log_base: LogBase | None = None
) -> list[OutcomeMeasure]:
    """
    epsilon of every post-measurement state of a projective measurement.

    Args:
        rho (DensityOperator): State before the measurement.
        projectors (Sequence[DenseOperator]): Pairwise orthogonal projectors resolving the identity.
        p (Partition): Blocks of factor indices.
        log_base (LogBase, optional): Output base.

    Returns:
        list[OutcomeMeasure]: One entry per projector, in input order. Outcomes
        with zero probability carry ``report=None``.
    """
    p.validate_for(rho.layout)
    for proj in projectors:
        _check_projector(proj, rho.layout)
    d = rho.layout.total_dim
    total = sum(proj.matrix for proj in projectors)
    if np.max(np.abs(total - np.eye(d))) > Config.HERMITIAN_TOL * d:
        raise ValidationError("projectors do not resolve the identity", invariant="completeness")
    for i, first in enumerate(projectors):
        for second in projectors[i + 1:]:
            if np.max(np.abs(first.matrix @ second.matrix)) > Config.HERMITIAN_TOL * d:
                raise ValidationError("projectors are not pairwise orthogonal", invariant="orthogonality")

    def evaluate(projector: DenseOperator) -> OutcomeMeasure:
        probability = float(np.trace(rho.matrix @ projector.matrix).real)
        if probability <= Config.OUTCOME_TOL:
            return OutcomeMeasure(probability, None)
        reduced = measurement_reduce(rho, projector)
        return OutcomeMeasure(probability, entanglement_production(reduced, p, log_base))

    outcomes = ordered_map(evaluate, list(projectors), label="outcome")
    logger.info(f"measured {len(outcomes)} outcomes, {sum(o.report is None for o in outcomes)} impossible")
    return outcomes


def correlation(
    rho: DensityOperator, a: DenseOperator, b: DenseOperator, p: Partition | None = None
) -> float:
    """
    Connected correlator <A x B> - <A><B> between two blocks.

    Args:
        rho (DensityOperator): State on a bipartite layout.
        a (DenseOperator): Observable on the first block.
        b (DenseOperator): Observable on the second block.
        p (Partition, optional): Two-block partition; defaults to one block per factor
            for a two-factor layout.

    Returns:
        float: The real part of the correlator.
    """
    layout = rho.layout
    if p is None:
        if layout.n_factors != 2:
            raise ValidationError("correlation needs a two-block partition", invariant="layout")
        p = Partition.singletons(2)
    if p.n_blocks != 2:
        raise ValidationError("correlation needs a two-block partition", invariant="partition")
    p.validate_for(layout)
    block_a, block_b = p.blocks
    if a.layout != layout.sub_layout(block_a) or b.layout != layout.sub_layout(block_b):
        raise ValidationError("observable layouts do not match the partition blocks", invariant="layout")

    joint = np.trace(rho.matrix @ embed_blocks([a, b], p, layout).matrix)
    mean_a = np.trace(partial_trace(rho, block_a).matrix @ a.matrix)
    mean_b = np.trace(partial_trace(rho, block_b).matrix @ b.matrix)
    return float((joint - mean_a * mean_b).real)
