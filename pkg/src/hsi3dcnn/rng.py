"""Deterministic random streams built on the published splitmix64 generator.

Every source of randomness in the engine (split permutation, weight init,
epoch shuffling, dropout masks, synthetic data) draws from a `Stream` whose
seed is derived from the single user seed plus fixed integer stream ids, so
one seed reproduces an entire run bit for bit.

The generator is splitmix64 (Steele, Lea & Flood, 2014): from a 64-bit seed
``s`` the i-th output (i = 0, 1, ...) is ``mix64(s + (i+1)*GOLDEN) mod 2^64``
where GOLDEN = 0x9E3779B97F4A7C15 and ``mix64`` is the standard finalizer
below.  Because output i depends only on (seed, i), blocks of outputs are
generated vectorized with numpy and are identical to sequential scalar calls.

Derived quantities are fixed too:

* ``uniform``: float64 in [0, 1) as ``(u64 >> 11) * 2**-53``.
* ``normal``: Box-Muller over pairs of uniforms.
* ``permutation(n)``: stable argsort of the next n raw 64-bit outputs.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# Fixed stream ids; sub-ids (class index, epoch, layer index) are appended.
STREAM_SPLIT = 1
STREAM_INIT = 2
STREAM_SHUFFLE = 3
STREAM_DROPOUT = 4
STREAM_SYNTH = 5


def mix64(z: int) -> int:
    """splitmix64 output finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, *ids: int) -> int:
    """Derive a child stream seed from a base seed and integer stream ids.

    Defined as ``s = mix64(seed)`` followed by
    ``s = mix64((s ^ id) + GOLDEN)`` for each id in order.
    """
    s = mix64(seed & MASK64)
    for x in ids:
        s = mix64(((s ^ (x & MASK64)) + GOLDEN) & MASK64)
    return s


class Stream:
    """A positioned splitmix64 stream; all draws advance the position."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.pos = 0

    def next_u64(self) -> int:
        """Scalar reference path: one raw 64-bit output."""
        self.pos += 1
        return mix64((self.seed + self.pos * GOLDEN) & MASK64)

    def u64_block(self, n: int) -> np.ndarray:
        """Next n raw outputs, vectorized; identical to n next_u64() calls."""
        idx = np.arange(self.pos + 1, self.pos + n + 1, dtype=np.uint64)
        self.pos += n
        z = np.uint64(self.seed) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def uniform(self, n: int) -> np.ndarray:
        """n float64 samples in [0, 1)."""
        return (self.u64_block(n) >> np.uint64(11)) * (2.0 ** -53)

    def normal(self, n: int) -> np.ndarray:
        """n standard-normal float64 samples (Box-Muller)."""
        m = (n + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0,1], no log(0)
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:n]

    def permutation(self, n: int) -> np.ndarray:
        """A permutation of range(n): stable argsort of n raw outputs."""
        return np.argsort(self.u64_block(n), kind="stable")
