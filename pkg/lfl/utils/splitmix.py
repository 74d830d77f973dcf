"""SplitMix64 pseudo-random stream (bit-exact, platform independent)."""

from typing import Iterator

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """
    The SplitMix64 generator of Steele, Lea and Flood.

    Pure integer arithmetic, so every implementation reproduces the same
    stream from the same seed.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_symmetric(self) -> float:
        """Uniform double in [-1, 1)."""
        return 2.0 * self.next_double() - 1.0

    def __iter__(self) -> Iterator[int]:
        while True:
            yield self.next_u64()
