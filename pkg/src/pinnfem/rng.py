"""Seeded splitmix64 generator.

Weight initialization must be reproducible bit-for-bit across platforms and
numpy versions, so the package rolls the (tiny) generator it needs instead of
depending on numpy's Generator internals.  splitmix64 passes through a 64-bit
counter, mixes, and maps the top 53 bits to [0, 1).
"""

_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """64-bit splitmix generator producing uniform doubles in [0, 1)."""

    def __init__(self, seed):
        self._state = int(seed) & _MASK

    def next_uint64(self):
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_float(self):
        # Top 53 bits give the full double mantissa resolution.
        return (self.next_uint64() >> 11) * 2.0**-53

    def uniform(self, low, high):
        return low + (high - low) * self.next_float()
