"""Counter-based 64-bit mixing generator.

Every random bit in this package is produced by one fixed, documented
function: the SplitMix64 finalizer applied to ``key + k * GOLDEN`` for word
index k.  Streams are identified by ``(master_seed, tag, stream_index)``, so
a bit row depends only on its own identifiers.  Being stateless and
indexable, the generator yields bit-identical output regardless of chunking,
worker count, or evaluation order, and is trivial to reimplement elsewhere.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Stream tags: one namespace per consumer so parameter changes in one kind of
# draw never reshuffle another.
TAG_SHIFT_ROW = 0
TAG_IID_ROW = 1
TAG_TRIAL = 2
TAG_PROBE = 3


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed avalanching permutation of 64-bit words."""
    z = (z + GOLDEN) & MASK64
    z ^= z >> 30
    z = (z * _MIX1) & MASK64
    z ^= z >> 27
    z = (z * _MIX2) & MASK64
    z ^= z >> 31
    return z


def _mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` on a uint64 array (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = z + np.uint64(GOLDEN)
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(_MIX1)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return z


def stream_key(master_seed: int, stream: int, tag: int = 0) -> int:
    """Key of stream ``stream`` in the namespace ``tag`` under ``master_seed``.

    The coordinate index (stream) is mixed in after the master seed, so row i
    is the same function of (master_seed, i) no matter how many rows exist.
    """
    base = mix64((master_seed & MASK64) ^ mix64(tag))
    return mix64((base + (stream + 1) * GOLDEN) & MASK64)


def stream_bits(key: int, n_bits: int) -> np.ndarray:
    """First ``n_bits`` of the key's word stream, MSB first, as a uint8 array."""
    if n_bits < 0:
        raise ValueError("n_bits must be non-negative")
    n_words = -(-n_bits // 64)
    if n_words == 0:
        return np.zeros(0, dtype=np.uint8)
    with np.errstate(over="ignore"):
        counters = np.uint64(key) + np.arange(1, n_words + 1, dtype=np.uint64) * np.uint64(GOLDEN)
    words = _mix64_array(counters)
    raw = words.astype(">u8").view(np.uint8)
    return np.unpackbits(raw)[:n_bits]


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial 64-bit seed; trials are independent streams of the master."""
    return stream_key(master_seed, trial_index, tag=TAG_TRIAL)
