"""SplitMix64 stream, vectorized with numpy.

Used for every seeded draw in the package so generated data is reproducible
across platforms and independent of numpy's bit generators.
"""
import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    def __init__(self, seed):
        self.state = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)

    def next_u64(self, count):
        """Return the next ``count`` outputs as a uint64 array."""
        with np.errstate(over="ignore"):
            steps = np.arange(1, count + 1, dtype=np.uint64)
            z = self.state + steps * _GAMMA
            self.state = self.state + np.uint64(count) * _GAMMA
            z = (z ^ (z >> np.uint64(30))) * _MUL1
            z = (z ^ (z >> np.uint64(27))) * _MUL2
            return z ^ (z >> np.uint64(31))

    def uniform(self, count, low=0.0, high=1.0):
        """Doubles in [low, high) from the top 53 bits of each output."""
        u = (self.next_u64(count) >> np.uint64(11)).astype(np.float64)
        u *= 2.0 ** -53
        return low + (high - low) * u

    def tensor(self, shape, low=-1.0, high=1.0):
        """Draw a tensor filled in mode-1-fastest order."""
        count = int(np.prod(shape))
        return self.uniform(count, low, high).reshape(shape, order="F")


def random_tensor(shape, seed, low=-1.0, high=1.0):
    return SplitMix64(seed).tensor(shape, low, high)
