"""SplitMix64: tiny, splittable, and reproducible across implementations."""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """
    Steele/Lea/Flood SplitMix64.

    ``below(n)`` reduces one 64-bit output modulo ``n``; the bias is below
    n / 2**64 and is accepted for test-case generation.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next())
