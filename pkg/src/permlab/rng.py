"""Seedable, splittable random streams.

All randomness flows through numpy's PCG64 keyed by
``SeedSequence(seed, spawn_key=(stream,))`` or ``(stream, substream)``.
Given (seed, stream[, substream]) the byte stream is fixed, so every run is
bit-reproducible on any platform and for any worker count: replica r of a
Monte Carlo run always draws from stream r, regardless of which worker
executes it.
"""
from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np

__all__ = ["RngSeed", "make_generator", "fresh_seed"]


@dataclass(frozen=True)
class RngSeed:
    """A root seed plus a stream index."""

    seed: int
    stream: int = 0

    def generator(self, substream: int | None = None) -> np.random.Generator:
        return make_generator(self.seed, self.stream, substream)


def make_generator(
    seed: int, stream: int = 0, substream: int | None = None
) -> np.random.Generator:
    """PCG64 generator for (seed, stream[, substream])."""
    key = (stream,) if substream is None else (stream, substream)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def fresh_seed() -> int:
    """A new root seed from OS entropy (printed by the CLI when none is given)."""
    return secrets.randbits(63)
