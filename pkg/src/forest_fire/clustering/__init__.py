from .firecluster import ClusterResult, FireParams, HeatTrace, audit, average_heat, cluster, heat_profile, propagate
from .montecarlo import ValidationReport, posterior_matrix, significant_mask, validate
from .online import OnlineResult, online_assign

__all__ = [
    'ClusterResult',
    'FireParams',
    'HeatTrace',
    'OnlineResult',
    'ValidationReport',
    'audit',
    'average_heat',
    'cluster',
    'heat_profile',
    'online_assign',
    'posterior_matrix',
    'propagate',
    'significant_mask',
    'validate',
]
