"""Seeded, splittable random streams.

Every stochastic routine takes a seed that is an int or a tuple of ints;
``stream(seed, r)`` gives repetition ``r`` its own independent generator so
results never depend on execution order.
"""

import numpy as np

GREEDY_KEY = 0x67726479


def _flatten(parts):
    out = []
    for p in parts:
        if isinstance(p, (tuple, list)):
            out.extend(_flatten(p))
        elif isinstance(p, np.random.Generator):
            raise TypeError("pass integer seeds, not generators")
        else:
            out.append(int(p))
    return out


def stream(seed, *keys):
    """Independent ``numpy`` generator for ``(seed, *keys)``."""
    if isinstance(seed, np.random.Generator) and not keys:
        return seed
    return np.random.default_rng(np.random.SeedSequence(_flatten((seed,) + keys)))
