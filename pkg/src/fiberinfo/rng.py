"""Counter-based random streams keyed by (seed, realization index).

Each Monte Carlo realization draws from its own Philox stream, so results
do not depend on how realizations are batched or scheduled.
"""

import numpy as np


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` of run ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def streams(seed: int, start: int, count: int):
    """Generators for realizations ``start .. start+count-1``."""
    return [stream(seed, start + k) for k in range(count)]
