"""Counter-based random streams addressable by ``(seed, index)``.

Each stream is a Philox4x64 generator keyed by the user seed (low 64 key
bits) and a purpose tag (high 64 key bits), with the stream index placed in
the most significant counter word. Streams with different indices therefore
walk disjoint counter ranges, and any stream can be rebuilt on its own
without replaying the others, which is what makes parallel bootstrap
evaluation reproducible.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigInvalid

MASK64 = (1 << 64) - 1

# Purpose tags keep, e.g., simulation noise and bootstrap draws independent
# even when the same user seed is reused for both.
BOOTSTRAP = 1
SIMULATE = 2
CLUSTER = 3


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigInvalid(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ConfigInvalid(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, index: int = 0, purpose: int = 0) -> np.random.Generator:
    seed = check_seed(seed)
    if not 0 <= index <= MASK64:
        raise ConfigInvalid(f"stream index out of range: {index}")
    key = seed | (purpose << 64)
    bitgen = np.random.Philox(key=key, counter=[0, 0, 0, index])
    return np.random.Generator(bitgen)
