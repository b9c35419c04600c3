"""Deterministic random-stream construction.

Every stochastic routine in the package takes either an explicit
``numpy.random.Generator`` or a ``(seed, chain_id)`` pair.  The pair is turned
into an independent stream with ``SeedSequence(seed, spawn_key=(chain_id,))``,
so concurrent chains, annealing trials, and diagnostic replicas never share a
stream and rerunning with the same pair reproduces byte-identical output.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, chain_id: int = 0) -> np.random.Generator:
    """Return the PCG64 generator for stream ``chain_id`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chain_id),))
    return np.random.Generator(np.random.PCG64(ss))


def substreams(seed: int, count: int, offset: int = 0) -> list[np.random.Generator]:
    """Streams ``offset .. offset+count-1`` of ``seed``, in order."""
    return [stream(seed, offset + i) for i in range(count)]
