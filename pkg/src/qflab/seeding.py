"""Deterministic random-stream derivation.

Every random draw in the package comes from a stream addressed by
(master seed, role, up to three indices).  Spawn keys are padded to a fixed
length with distinct role tags, so no stream's key is a prefix of another's;
prefix-related SeedSequence keys produce visibly correlated first draws,
which is exactly the kind of bias the attack statistics would pick up.
"""

from __future__ import annotations

import numpy as np

ROLE_THETA = 1
ROLE_EXPERIMENT = 2
ROLE_ATTEMPT = 3
ROLE_BATCH = 4
ROLE_SHUFFLE = 5
ROLE_CENSUS = 6
ROLE_DATASET = 7
ROLE_GRADIENT_INDEX = 8
ROLE_TEST = 9

_KEY_LENGTH = 4


def derive_rng(master_seed: int, role: int, *indices: int) -> np.random.Generator:
    """Independent generator for one (role, indices) address."""
    if len(indices) > _KEY_LENGTH - 1:
        raise ValueError(f"at most {_KEY_LENGTH - 1} indices, got {len(indices)}")
    key = (role, *indices) + (0,) * (_KEY_LENGTH - 1 - len(indices))
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=key)
    )
