"""Deterministic, splittable random streams.

Gaussian variates are produced by a Box-Muller transform applied to the
uniform output of a counter-based Philox generator.  Distinct stream
indices address disjoint counter blocks, so substreams never overlap and
the same (seed, index) pair always reproduces the same bytes, on any
platform with IEEE-754 doubles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RandomStream:
    """One independent substream of a master seed.

    Each ``stream_index`` starts the Philox counter at a distinct multiple of
    2**128, which keeps substreams disjoint for any realistic draw count.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0 <= int(self.stream_index) < 2**64:
            raise ValueError("stream_index must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        bitgen = np.random.Philox(key=int(self.master_seed),
                                  counter=int(self.stream_index) << 128)
        return np.random.Generator(bitgen)

    def substream(self, offset: int) -> "RandomStream":
        return RandomStream(self.master_seed, int(self.stream_index) + int(offset))


def normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """n real N(0, 1) variates via Box-Muller."""
    if n == 0:
        return np.empty(0)
    m = (n + 1) // 2
    u1 = 1.0 - gen.random(m)  # (0, 1], keeps the log finite
    u2 = gen.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.concatenate([r * np.cos(_TWO_PI * u2), r * np.sin(_TWO_PI * u2)])
    return out[:n]


def complex_normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard complex Gaussians with <|z|^2> = 1 (components of variance 1/2)."""
    if n == 0:
        return np.empty(0, dtype=complex)
    u1 = 1.0 - gen.random(n)
    u2 = gen.random(n)
    r = np.sqrt(-np.log(u1))
    return r * np.exp(1j * _TWO_PI * u2)
