import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np

from ..config import settings

logger = logging.getLogger(__name__)

R = TypeVar("R")


def worker_count(threads: int | None = None) -> int:
    threads = settings.THREADS if threads is None else threads
    return threads if threads > 0 else (os.cpu_count() or 1)


def chunk_sizes(reps: int, chunk: int | None = None) -> List[int]:
    """Split reps into fixed-size chunks; the last chunk may be short."""
    chunk = chunk or settings.REPLICA_CHUNK
    full, rest = divmod(reps, chunk)
    return [chunk] * full + ([rest] if rest else [])


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for chunk `index` of a run seeded `seed`."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def run_chunked(
    task: Callable[[int, int, np.random.Generator], R],
    reps: int,
    seed: int,
    threads: int | None = None,
    chunk: int | None = None,
) -> List[R]:
    """
    Evaluate task(offset, size, rng) for every replica chunk.

    Chunk boundaries and streams depend only on (reps, seed, chunk), so the
    merged result is the same for any worker count.
    """
    sizes = chunk_sizes(reps, chunk)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int).tolist() if sizes else []
    workers = worker_count(threads)
    logger.debug("Running %d replicas in %d chunk(s) on %d worker(s)", reps, len(sizes), workers)

    if workers == 1 or len(sizes) <= 1:
        return [task(off, size, chunk_rng(seed, i)) for i, (off, size) in enumerate(zip(offsets, sizes))]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(task, off, size, chunk_rng(seed, i))
            for i, (off, size) in enumerate(zip(offsets, sizes))
        ]
        return [f.result() for f in futures]
