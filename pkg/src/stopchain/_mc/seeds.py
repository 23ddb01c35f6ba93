"""Deterministic sub-seeded RNG shared by both Monte Carlo backends.

Every trial gets its own PCG32 substream derived from (master seed, trial
index), so results are independent of how trials are sharded across workers,
and the compiled and pure-Python backends consume identical streams: one
32-bit draw per chain step, converted to a double in [0, 1).
"""

MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT = 6364136223846793005

#: 1/2^32; multiplying a 32-bit draw by this matches the C kernels bit-for-bit.
U32_TO_UNIT = 2.0**-32


def splitmix64(z):
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def substream(master, index):
    """(state, inc) for PCG32 substream `index` of `master`."""
    a = splitmix64((master & MASK64) ^ splitmix64(index & MASK64))
    b = splitmix64(a)
    return a, (b | 1) & MASK64


class Pcg32:
    """PCG-XSH-RR 64/32, mirrored exactly by the compiled kernels."""

    __slots__ = ("state", "inc")

    def __init__(self, master, index=0):
        self.state, self.inc = substream(master, index)

    def next_u32(self):
        old = self.state
        self.state = (old * _MULT + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & MASK32

    def uniform(self):
        return self.next_u32() * U32_TO_UNIT
