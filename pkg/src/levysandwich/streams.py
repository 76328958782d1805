"""Deterministic RNG stream addressing for replication-parallel Monte Carlo.

Every replication owns its own generator addressed by ``(seed, index)``, so
results are bit-identical regardless of how replications are scheduled
across workers, and reductions stay order-independent by collecting into
index-addressed slots.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for replication `index` under a master `seed`."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def spawn_streams(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """n child generators of `rng`, independent of each other and the parent."""
    return rng.spawn(n)


def replicate(
    fn: Callable[[np.random.Generator, int], T],
    streams: Sequence[np.random.Generator],
    workers: int = 1,
) -> list[T]:
    """Run ``fn(stream, index)`` for every stream, results in index order.

    ``workers > 1`` fans out over a thread pool; numpy kernels release the
    GIL so replication-level parallelism is real for array-heavy work. The
    output list is identical for any worker count.
    """
    if workers <= 1:
        return [fn(stream, i) for i, stream in enumerate(streams)]
    results: list[T] = [None] * len(streams)  # type: ignore[list-item]

    def _run(i: int) -> None:
        results[i] = fn(streams[i], i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(_run, range(len(streams))))
    return results
