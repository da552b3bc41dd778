"""
Seeded random streams.

Every random draw in ATMask goes through a Philox counter-based generator
built from an explicit seed, so no hidden global RNG state exists and
streams can be split deterministically by key (step, volume index, ...).
"""
import numpy as np

SEED_MASK = 0xFFFFFFFFFFFFFFFF


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Build an independent Philox stream for ``seed`` and an optional key path.

    The same (seed, keys) always yields the same stream; different key
    paths yield statistically independent streams.
    """
    sequence = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a 64-bit child seed from a base seed and a key path."""
    sequence = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def sample_without_replacement(rng: np.random.Generator, pool: np.ndarray, k: int) -> np.ndarray:
    """Shuffle ``pool`` with ``rng`` and take the first ``k`` entries."""
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    shuffled = rng.permutation(np.asarray(pool, dtype=np.int64))
    return shuffled[:k]
