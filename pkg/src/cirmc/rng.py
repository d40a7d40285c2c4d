"""Reproducible random-stream plumbing.

Every stochastic routine in this package draws from a numpy ``Generator``.
``RngStream`` names one substream of a master seed: the pair
``(seed, stream_id)`` fully determines the variate sequence, and distinct
stream ids give statistically independent streams (``SeedSequence`` spawn
keys), which is how concurrent chains stay decoupled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream", "as_generator"]

_U64 = 2**64


@dataclass
class RngStream:
    """One named substream of a master seed.

    The same ``(seed, stream_id)`` always reproduces the same variates;
    different ``stream_id`` values under one seed are independent. A stream
    must not be shared across concurrent workers — allocate one per chain.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.default_rng(ss)


def as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    """Accept either an RngStream or a raw numpy Generator."""
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")
