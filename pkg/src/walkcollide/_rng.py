"""Counter-keyed random streams for the walk simulators.

Every (master_seed, stream_index) pair is hashed through a splitmix64
finalizer into the state of an independent xoshiro256++ generator.  This
makes per-trial streams O(1) to construct inside jitted kernels, so Monte
Carlo runs can derive one stream per trial and reproduce any single trial
bit-for-bit regardless of how trials are scheduled across workers.

All helpers are numba kernels operating on an explicit 4-word state tuple;
they return (value, new_state).  Keep every integer literal wrapped in
uint64: mixing signed and unsigned types silently promotes to float64
under numba.
"""

import numpy as np
from numba import njit, uint64, float64

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_SPLITMIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_TWO53_INV = 1.0 / 9007199254740992.0  # 2**-53


@njit(uint64(uint64), cache=True, nogil=True)
def mix64(z):
    """splitmix64 finalizer; bijective on 64-bit words."""
    z = z + _SPLITMIX_GAMMA
    z = (z ^ (z >> uint64(30))) * _MIX_A
    z = (z ^ (z >> uint64(27))) * _MIX_B
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def stream_state(master_seed, stream_index):
    """Initial xoshiro256++ state for one (master, stream) pair.

    Two nested mix rounds keep distinct pairs from colliding even when
    master_seed and stream_index differ in compensating ways.
    """
    key = mix64(uint64(master_seed) ^ mix64(uint64(stream_index)))
    s0 = mix64(key)
    s1 = mix64(s0)
    s2 = mix64(s1)
    s3 = mix64(s2)
    # xoshiro must not start at the all-zero state; mix64 output of
    # distinct inputs cannot produce four zero words in a row, but guard
    # anyway so the generator never locks up.
    if s0 == uint64(0) and s1 == uint64(0) and s2 == uint64(0) and s3 == uint64(0):
        s0 = _SPLITMIX_GAMMA
    return s0, s1, s2, s3


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (uint64(64) - k))


@njit(cache=True, nogil=True, inline="always")
def next_u64(state):
    s0, s1, s2, s3 = state
    out = _rotl(s0 + s3, uint64(23)) + s0
    t = s1 << uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, uint64(45))
    return out, (s0, s1, s2, s3)


@njit(cache=True, nogil=True, inline="always")
def next_unit(state):
    """Uniform double in [0, 1) with 53 random bits."""
    x, state = next_u64(state)
    return float64(x >> uint64(11)) * _TWO53_INV, state


@njit(cache=True, nogil=True, inline="always")
def next_exponential(state):
    """Standard Exponential(1) variate; -log(1-u) never sees log(0)."""
    u, state = next_unit(state)
    return -np.log(1.0 - u), state


@njit(cache=True, nogil=True, inline="always")
def next_below(state, n):
    """Unbiased uniform integer in [0, n) by rejection (n must be >= 1)."""
    lim = (uint64(0) - n) % n
    while True:
        x, state = next_u64(state)
        if x >= lim:
            return x % n, state
