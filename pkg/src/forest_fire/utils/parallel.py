import os
from typing import Sequence

import numpy as np


def resolve_workers(threads: int) -> int:
    """Translate a worker cap (0 = auto) into a joblib n_jobs value."""
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *stream).

    Streams with different keys are independent, so parallel workers can
    derive their generator from the task index alone.
    """
    entropy: Sequence[int] = [int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(s) for s in stream]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
