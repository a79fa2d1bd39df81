"""Reproducible random streams.

Generator
    PCG64 (``numpy.random.PCG64``), seeded through ``numpy.random.SeedSequence``.
Stream splitting
    Trial ``t`` of a batch with master seed ``s`` uses
    ``SeedSequence(entropy=s, spawn_key=(t,))``. Its first three 64-bit words
    (``generate_state(3, uint64)``) seed the matrix, signal and noise draws
    of that trial, in that order.
Gaussian draws
    Box-Muller on PCG64 doubles: ``u1 = 1 - U``, ``u2 = U'`` and the pair
    ``sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)``, emitted cosine first.
    numpy's ziggurat sampler is deliberately avoided so another language
    can reproduce the same matrices from the same seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation

SEED_BOUND = 2**64


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_BOUND:
        raise ContractViolation(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed))))


def substream_seeds(master_seed: int, index: int, count: int = 3) -> list[int]:
    ss = np.random.SeedSequence(entropy=check_seed(master_seed), spawn_key=(int(index),))
    return [int(v) for v in ss.generate_state(count, dtype=np.uint64)]


def substream(master_seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=check_seed(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    pairs = (size + 1) // 2
    u = rng.random(2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    out = np.empty((pairs, 2))
    out[:, 0] = radius * np.cos(angle)
    out[:, 1] = radius * np.sin(angle)
    return out.reshape(-1)[:size]
