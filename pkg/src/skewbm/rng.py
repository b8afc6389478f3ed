"""Counter-based random streams.

Every stochastic routine in the package draws from a :class:`RngStream`,
a (seed, stream) pair mapped onto a Philox counter-based generator.  Equal
pairs always reproduce the same draw sequence; distinct stream ids give
statistically independent streams, so batches can be computed in any order
(or in parallel) without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_U64 = np.uint64
_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Identifier of one reproducible random stream."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)):
            raise TypeError("seed must be an integer")
        if not isinstance(self.stream, (int, np.integer)):
            raise TypeError("stream must be an integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.seed & _MASK, self.stream & _MASK], dtype=_U64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngStream":
        """Stream with id shifted by ``offset`` under the same seed.

        Callers fanning out per-item streams (one per path, say) should space
        their base ids far enough apart that ranges never overlap; the verify
        suite uses multiples of 2**32.
        """
        return RngStream(self.seed, (self.stream + offset) & _MASK)
