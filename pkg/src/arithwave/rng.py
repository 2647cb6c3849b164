"""Counter-based random streams addressed by ``(seed, index)``.

Every Monte-Carlo trial draws from its own Philox stream, so results do not
depend on how trials are split across workers.
"""
from __future__ import annotations

import numpy as np

from .errors import ArgumentError

_MASK64 = (1 << 64) - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ArgumentError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` under ``seed``."""
    seed = _check_seed(seed)
    index = int(index)
    if not 0 <= index <= _MASK64:
        raise ArgumentError(f"stream index must lie in [0, 2**64), got {index}")
    return np.random.Generator(np.random.Philox(key=(index << 64) | seed))


def substream(seed: int, index: int, tag: int) -> np.random.Generator:
    """A second family of streams, disjoint from :func:`stream` for ``tag > 0``.

    Used when one experiment needs two independent sources per trial (for
    example a field and its perturbation).
    """
    seed = _check_seed(seed)
    mixed = np.random.SeedSequence([seed, int(tag)]).generate_state(2, dtype=np.uint64)
    key = (int(index) << 64) | int(mixed[0])
    return np.random.Generator(np.random.Philox(key=key))
