"""SplitMix64: the seeded generator behind hash coefficients, row seeds and bench keys.

The update is Steele, Lea and Flood's SplitMix64. Uniform draws from [n] use rejection
on the smallest covering bit width, never a modulo, so coefficients are unbiased.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randbits(self, nbits: int) -> int:
        """Uniform integer in [2^nbits], built from as many 64-bit words as needed."""
        value = 0
        filled = 0
        while filled < nbits:
            value |= self.next_u64() << filled
            filled += 64
        return value & ((1 << nbits) - 1)

    def below(self, n: int) -> int:
        """Uniform integer in [n] by rejection sampling."""
        if n < 1:
            raise ValueError(f"range must be non-empty, got {n}")
        nbits = (n - 1).bit_length()
        while True:
            candidate = self.randbits(nbits)
            if candidate < n:
                return candidate
