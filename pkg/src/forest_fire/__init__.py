"""Forest Fire clustering: label propagation by heat over a kernel graph."""

from .clustering import FireParams, cluster, online_assign, validate
from .errors import ContractViolation, ForestFireError, MetricUndefinedError, ParameterError, ValidationError
from .graph import AffinityGraph, KernelSpec, build_graph

__version__ = '0.1.0'

__all__ = [
    'AffinityGraph',
    'ContractViolation',
    'FireParams',
    'ForestFireError',
    'KernelSpec',
    'MetricUndefinedError',
    'ParameterError',
    'ValidationError',
    'build_graph',
    'cluster',
    'online_assign',
    'validate',
]
