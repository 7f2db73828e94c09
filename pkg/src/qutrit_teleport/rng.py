"""Counter-based random streams keyed by ``(master_seed, trial_index)``.

Every trial gets its own Philox stream: the master seed is the cipher key
and the trial index occupies the second counter word. Streams are therefore
independent of how trials are scheduled across workers.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

SEED_BITS = 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    if trial_index < 0 or trial_index >= 2**64:
        raise DomainError(f"trial index out of range: {trial_index}")
    bitgen = np.random.Philox(key=check_seed(master_seed), counter=[0, trial_index, 0, 0])
    return np.random.Generator(bitgen)
