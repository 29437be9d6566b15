"""
entprod: entanglement production of operators on tensor-product Hilbert spaces.
"""
from .config import Config, LogBase
from .errors import ImpossibleOutcomeError, NumericError, OracleError, ValidationError, ZeroTraceError
from .hilbert import DenseOperator, DensityOperator, Partition, SpaceLayout
from .measure import MeasureReport, entanglement_production, gibbs_measure, pure_state_measure

__all__ = [
    'Config',
    'LogBase',
    'DenseOperator',
    'DensityOperator',
    'Partition',
    'SpaceLayout',
    'MeasureReport',
    'entanglement_production',
    'gibbs_measure',
    'pure_state_measure',
    'ValidationError',
    'NumericError',
    'ZeroTraceError',
    'ImpossibleOutcomeError',
    'OracleError',
]
