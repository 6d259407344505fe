"""Named, reproducible random substreams.

Every stochastic routine in this package takes an explicit generator (or a
root seed from which it derives named substreams). Substreams derived from
the same root seed but different names are statistically independent, and a
given (seed, name) pair always yields the same stream, across processes and
platforms. This is what makes the algebraic reductions in the scheduler
(img2img equivalence, multi-exemplar collapse) hold bit-exactly: each
consumer reads its own stream, so extra draws on one stream never shift
another.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "pass_seed"]


def _name_key(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def substream(seed: int, name: str) -> np.random.Generator:
    """Return the named substream of the root seed.

    Same (seed, name) -> bit-identical stream. Distinct names give
    independent streams.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_name_key(name),))
    return np.random.default_rng(ss)


def pass_seed(seed: int, index: int) -> int:
    """Derive the root seed for pass `index` of an iterative run.

    Pass 0 keeps the original seed so a single-pass run is bit-identical to
    a direct run; later passes get independent derived seeds.
    """
    if index == 0:
        return seed
    ss = np.random.SeedSequence(entropy=(seed, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
