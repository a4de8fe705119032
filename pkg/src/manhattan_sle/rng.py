"""Counter-based splittable random streams.

Every Monte Carlo sample gets its own stream derived from
(master_seed, sample_index), so results are bit-identical for any
partition of the sample range across workers.  The generator is
splitmix64; the numba kernels reimplement the identical arithmetic
(see kernels.py) and the two are cross-checked in the test suite.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_state(master_seed: int, index: int) -> int:
    """Initial splitmix64 state for sample `index` under `master_seed`."""
    return _mix((master_seed + (index + 1) * GOLDEN) & MASK64)


class SampleStream:
    """Sequential splitmix64 draws for one sample.

    Coin bits are consumed LSB-first from 64-bit words; a word is only
    drawn when the bit buffer is empty, so forced walk steps consume no
    randomness.
    """

    def __init__(self, master_seed: int, index: int):
        self._state = stream_state(master_seed, index)
        self._bits = 0
        self._nbits = 0

    def next_word(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return _mix(self._state)

    def coin(self) -> int:
        if self._nbits == 0:
            self._bits = self.next_word()
            self._nbits = 64
        bit = self._bits & 1
        self._bits >>= 1
        self._nbits -= 1
        return bit

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_word() >> 11) * INV_2_53
