"""Counter-based 64-bit hashing used for every random draw in the package.

All streams are derived from the SplitMix64 finalizer. A uniform is a pure
function of ``(key, counter)``, so draws never depend on visit or execution
order. The mixing scheme is versioned by ``HASH_VERSION``; changing any
constant here changes every reproduced number downstream.
"""

import numpy as np
from numba import njit

HASH_VERSION = "splitmix64-chain/1"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (bijective on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash_words(*words: int) -> int:
    """Chain ``mix64`` over a sequence of integers.

    Each step is ``h = mix64(h + (w + 1) * GOLDEN)``; for a fixed prefix the
    map from the last word to the output is a bijection, so distinct counters
    never collide.
    """
    h = 0
    for w in words:
        h = mix64(h + ((w + 1) * GOLDEN & MASK64))
    return h


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(key: int, counters) -> np.ndarray:
    """Uniforms in the open interval (0, 1) keyed by ``(key, counter)``."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = mix64_array(np.uint64(key & MASK64) + (c + np.uint64(1)) * np.uint64(GOLDEN))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


def counter_uniform(key: int, counter: int) -> float:
    z = mix64((key + (counter + 1) * GOLDEN) & MASK64)
    return ((z >> 11) + 0.5) * _TWO_M53


@njit(cache=True, inline="always")
def _next_uniform(state):
    # SplitMix64 stream step; state is a one-element uint64 array.
    state[0] += np.uint64(GOLDEN)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return np.float64(z >> np.uint64(11)) * _TWO_M53
