from .config import Config, RunConfig
from .parallel import make_rng, resolve_workers

__all__ = ['Config', 'RunConfig', 'make_rng', 'resolve_workers']
