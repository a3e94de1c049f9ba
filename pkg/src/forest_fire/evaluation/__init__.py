from .metrics import adjusted_rand_index, contingency, purity, purity_by_truth, silhouette
from .sweep import calibrate_fire_temperature, fire_temperature_sweep

__all__ = [
    'adjusted_rand_index',
    'calibrate_fire_temperature',
    'contingency',
    'fire_temperature_sweep',
    'purity',
    'purity_by_truth',
    'silhouette',
]
