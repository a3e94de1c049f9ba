import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from ..errors import ParameterError
from ..graph.affinity import KernelSpec


class Config:
    """Environment-backed configuration defaults"""

    ENV_PREFIX = 'FFC_'

    DEFAULT_CONFIG = {
        'threads': '0',
        'log_level': 'INFO',
        'trials': '300',
        'alpha': '0.05',
    }

    def __init__(self, environ: Optional[Mapping[str, str]] = None):
        self.environ = os.environ if environ is None else environ

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """Get a configuration value"""
        value = self.environ.get(self.ENV_PREFIX + key.upper())
        if value is None or not value.strip():
            return default or self.DEFAULT_CONFIG.get(key)
        return value.strip()

    def get_threads(self) -> int:
        """Worker cap; 0 means use every available core."""
        try:
            return max(0, int(self.get('threads', '0')))
        except ValueError:
            return 0

    def get_log_level(self) -> int:
        """Return the logging level, falling back to INFO on unknown names."""
        name = (self.get('log_level', 'INFO') or 'INFO').upper()
        level = logging.getLevelName(name)
        return level if isinstance(level, int) else logging.INFO

    def get_trials(self) -> int:
        try:
            return int(self.get('trials', '300'))
        except ValueError:
            return 300

    def get_alpha(self) -> float:
        try:
            return float(self.get('alpha', '0.05'))
        except ValueError:
            return 0.05


@dataclass(frozen=True)
class RunConfig:
    """Flags of a single CLI invocation, merged with Config defaults"""

    command: str
    input: Optional[Path] = None
    kernel: str = 'gaussian'
    sigma: Optional[float] = None
    k: Optional[int] = None
    alpha: Optional[float] = None
    c: Optional[float] = None
    seed: int = 0
    trials: int = 300
    alpha_cutoff: float = 0.05
    threads: int = 0
    labels_in: Optional[Path] = None
    labels_out: Optional[Path] = None
    trace_out: Optional[Path] = None
    report_out: Optional[Path] = None
    train: Optional[Path] = None
    train_labels: Optional[Path] = None
    new: Optional[Path] = None
    pred: Optional[Path] = None
    truth: Optional[Path] = None
    output: Optional[Path] = None
    n: int = 500
    components: int = 8
    spread: float = 0.15
    radius: float = 1.0
    c_grid: tuple = ()
    report_in: Optional[Path] = None
    doublets: int = 0
    conditional: bool = False

    def kernel_spec(self) -> KernelSpec:
        """Validate the kernel flags and build the matching KernelSpec."""
        if self.kernel == 'gaussian':
            if self.sigma is None:
                raise ParameterError("--sigma is required with --kernel gaussian")
            return KernelSpec.gaussian(self.sigma)
        if self.kernel == 'adaptive':
            if self.k is None:
                raise ParameterError("--k is required with --kernel adaptive")
            if self.alpha is None:
                raise ParameterError("--alpha is required with --kernel adaptive")
            return KernelSpec.adaptive(self.k, self.alpha)
        raise ParameterError(f"Unknown kernel '{self.kernel}'; use gaussian or adaptive")

    def fire_temperature(self) -> float:
        if self.c is None:
            raise ParameterError("--c is required")
        return self.c
