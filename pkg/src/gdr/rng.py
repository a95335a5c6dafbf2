"""Named, independent random streams derived from one run seed.

Each stream is a Philox (counter-based) generator keyed by
``(seed, stream id, *extra keys)`` through ``numpy.random.SeedSequence``.
Streams never share state, so drawing more numbers from one stream leaves
every other stream untouched.

Stream ids are fixed and must never be renumbered:

============== == ==========================================================
name           id  consumer
============== == ==========================================================
init           0   initial genome and critic weights
es_sampling    1   ES population noise, keyed by generation
buffer_sampling 2  TD3 minibatch indices, keyed by generation
target_noise   3   TD3 target policy smoothing noise, keyed by generation
exploration    4   action noise, keyed by (generation, population index)
============== == ==========================================================
"""

from __future__ import annotations

import numpy as np

STREAMS = {
    "init": 0,
    "es_sampling": 1,
    "buffer_sampling": 2,
    "target_noise": 3,
    "exploration": 4,
}

_U64 = (1 << 64) - 1


class RngTree:
    def __init__(self, seed: int):
        # negative seeds are folded into the unsigned 64-bit range
        self.seed = int(seed) & _U64

    def generator(self, name: str, *keys: int) -> np.random.Generator:
        try:
            stream = STREAMS[name]
        except KeyError:
            raise KeyError(f"unknown rng stream {name!r}; known: {sorted(STREAMS)}") from None
        ss = np.random.SeedSequence(self.seed, spawn_key=(stream, *(int(k) for k in keys)))
        return np.random.Generator(np.random.Philox(ss))


def rng_tree(seed: int) -> RngTree:
    return RngTree(seed)
