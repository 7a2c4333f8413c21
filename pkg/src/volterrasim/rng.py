"""Reproducible per-path random streams.

Every stochastic routine in the package draws from counter-based Philox
streams keyed by (seed, stream_id, path_index).  A path's stream depends
only on those integers, never on how work is split across workers, so
ensembles are bit-identical for any worker count.
"""

import numpy as np


def path_rng(seed: int, stream: int, path: int) -> np.random.Generator:
    """Generator for one (stream, path) pair of a seeded run."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(stream, path))
    return np.random.Generator(np.random.Philox(seq))


def substream(seed: int, stream: int) -> np.random.Generator:
    """Generator for non-path randomness (e.g. permutation shuffles)."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(seq))


def normal_matrix(seed: int, stream: int, n_rows: int, n_paths: int,
                  path_offset: int = 0) -> np.ndarray:
    """Standard-normal (n_rows, n_paths) matrix, column p from stream
    (seed, stream, path_offset + p).

    The offset lets workers generate disjoint path blocks that agree
    bit-for-bit with a single-worker run.
    """
    out = np.empty((n_rows, n_paths))
    for p in range(n_paths):
        out[:, p] = path_rng(seed, stream, path_offset + p).standard_normal(n_rows)
    return out
