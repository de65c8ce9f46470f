"""Counter-based random numbers.

Python-level code uses numpy's Philox (counter-based, keyed per stream). The
numba kernels use the splitmix64 finalizer as a counter-mode hash: every edge
state is a pure function of (seed, sample index, edge key), so configurations
are reproducible independently of exploration order, chunking and thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def philox(seed: int, stream: int = 0) -> np.random.Generator:
    """Keyed Philox generator; distinct streams are statistically independent."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@njit(inline="always", cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * MIX1
    z = (z ^ (z >> _S27)) * MIX2
    return z ^ (z >> _S31)


@njit(inline="always", cache=True)
def sample_key(seed, idx):
    """Per-sample hash state; combine with edge keys via edge_u01."""
    return mix64(np.uint64(seed) + GOLDEN * np.uint64(idx) + np.uint64(1))


@njit(inline="always", cache=True)
def u01(h):
    return np.float64(h >> _S11) * _INV53


@njit(inline="always", cache=True)
def edge_u01(hs, key):
    return u01(mix64(hs ^ (GOLDEN * np.uint64(key))))


@njit(inline="always", cache=True)
def next_state(state):
    return state + GOLDEN


@njit(inline="always", cache=True)
def state_u01(state):
    return u01(mix64(state))


@njit(inline="always", cache=True)
def edge_key(x, y, orient):
    """Unique key for the lattice edge leaving (x, y) rightwards (0) or upwards (1).

    Valid for coordinates in [-2^19, 2^19).
    """
    return ((np.uint64(x + 524288) << np.uint64(21))
            | (np.uint64(y + 524288) << np.uint64(1))
            | np.uint64(orient))
