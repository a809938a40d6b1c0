"""
Per-trial seed derivation.

    h = splitmix64(base_seed)
    h = splitmix64(h ^ T)
    seed = splitmix64(h ^ trial_index)

All arithmetic is modulo 2^64, so the schedule is reproducible in any
language with 64-bit unsigned integers.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_trial_seed(base_seed: int, T: int, trial_index: int) -> int:
    h = splitmix64(int(base_seed) & MASK64)
    h = splitmix64(h ^ (int(T) & MASK64))
    return splitmix64(h ^ (int(trial_index) & MASK64))


def trial_rng(base_seed: int, T: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(derive_trial_seed(base_seed, T, trial_index))
