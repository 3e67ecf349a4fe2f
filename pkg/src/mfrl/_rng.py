"""Counter-based random streams.

Every random draw in the package comes from a Philox generator whose key is
the user seed and whose counter is offset by ``(stream, tag)``. Stream ``r``
of tag ``g`` starts at counter ``[0, 0, r, g]``; a single stream would need
2**128 blocks before touching its neighbour, so streams never overlap and
any replicate can be regenerated on its own, in any order, on any thread.
"""

import os

import numpy as np

MASK64 = (1 << 64) - 1

# module tags for the third counter word
TAG_NOISE = 1
TAG_EXACT = 2
TAG_PRODUCT = 3


def stream_generator(seed, stream=0, tag=0):
    """Return a ``numpy.random.Generator`` for one (seed, stream, tag) cell."""
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    key = [seed & MASK64, (seed >> 64) & MASK64]
    counter = [0, 0, int(stream) & MASK64, int(tag) & MASK64]
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def default_threads():
    try:
        return max(1, int(os.environ.get("MFRL_THREADS", "1")))
    except ValueError:
        return 1
