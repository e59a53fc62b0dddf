"""Counter-based random streams keyed by draw, species and sub-block index."""
import numpy as np

from src.errors import DomainError

_ROOT, _SPECIES, _SUBBLOCK, _NAMED = 0, 1, 2, 3

MAX_SEED = 2**64 - 1


class RandomStreams:
    """Independent Philox streams addressed by integer keys.

    A stream depends only on (seed, draw_index, key), never on how many values
    other streams consumed, so draws are reproducible under any scheduling.
    """

    def __init__(self, seed: int, draw_index: int = 0):
        if not 0 <= seed <= MAX_SEED:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.draw_index = int(draw_index)

    def _generator(self, *key: int) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.draw_index,) + tuple(key)
        )
        return np.random.Generator(np.random.Philox(sequence))

    def root(self) -> np.random.Generator:
        return self._generator(_ROOT)

    def species(self, ell: int) -> np.random.Generator:
        return self._generator(_SPECIES, ell)

    def subblock(self, ell: int, j: int, k: int) -> np.random.Generator:
        return self._generator(_SUBBLOCK, ell, j, k)

    def named(self, index: int) -> np.random.Generator:
        """Stream for vectorised or auxiliary sampling."""
        return self._generator(_NAMED, index)

    def for_draw(self, draw_index: int) -> "RandomStreams":
        return RandomStreams(self.seed, draw_index)
