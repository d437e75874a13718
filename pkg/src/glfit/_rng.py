"""Small seedable random source with a fixed, documented output sequence.

The generator is xorshift64* (Vigna 2014) seeded through one round of
splitmix64, so the same seed yields the same stream in any language that
implements the two recurrences on unsigned 64-bit integers:

    splitmix64:  z = seed + 0x9E3779B97F4A7C15
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                 state = z ^ (z >> 31)            (0 is replaced by 1)

    xorshift64*: x ^= x >> 12; x ^= x << 25; x ^= x >> 27
                 output = x * 0x2545F4914F6CDD1D

``uniform()`` maps the top 53 bits of an output to ``[0, 1)``.
"""

import math

_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64(seed):
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class XorShift64Star:
    __slots__ = ("_state",)

    def __init__(self, seed):
        state = splitmix64(int(seed) & _MASK)
        self._state = state or 1

    def next_u64(self):
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self):
        """Uniform double in ``[0, 1)``."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform_open(self):
        """Uniform double in ``(0, 1)``, safe for logarithms."""
        while True:
            u = self.uniform()
            if u > 0.0:
                return u

    def normal(self):
        """Standard normal variate via the Marsaglia polar method (one per call)."""
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)

    def log_gamma_variate(self, shape):
        """Log of a unit-scale gamma variate (Marsaglia-Tsang).

        Shapes below 1 use the boost ``G(a) = G(a + 1) * U**(1/a)``, applied in
        log space so tiny shapes cannot underflow.
        """
        boost = 0.0
        if shape < 1.0:
            boost = math.log(self.uniform_open()) / shape
            shape += 1.0
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            z = self.normal()
            v = 1.0 + c * z
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.uniform_open()
            if math.log(u) < 0.5 * z * z + d - d * v + d * math.log(v):
                return math.log(d * v) + boost

    def sign(self):
        return 1.0 if self.next_u64() >> 63 else -1.0
