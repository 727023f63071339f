"""Deterministic seed derivation.

Every random stream in the package is derived from an explicit master seed,
a purpose label and an index, so results never depend on execution order or
on how work is split across threads.
"""

import zlib

import numpy as np


def _label_key(label):
    return zlib.crc32(label.encode("utf-8"))


def seed_sequence(master_seed, label, index=0):
    return np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(_label_key(label), int(index))
    )


def derive_seed(master_seed, label, index=0):
    """Child seed for ``(master_seed, label, index)`` as a 63-bit integer."""
    state = seed_sequence(master_seed, label, index).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def make_rng(master_seed, label, index=0):
    return np.random.default_rng(seed_sequence(master_seed, label, index))
