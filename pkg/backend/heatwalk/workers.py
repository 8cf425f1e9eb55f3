from __future__ import annotations

import logging
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .config import settings

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")

ChunkJob = Callable[[np.random.Generator, int], T]


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Generator for samples ``[chunk·size, (chunk+1)·size)``, fixed by (seed, chunk)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def chunk_sizes(samples: int, chunk_size: int) -> list[int]:
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


class SampleWorkerPool:
    """Runs Monte Carlo chunks on worker threads and returns them in chunk order."""

    def __init__(self, *, threads: int | None = None, chunk_size: int | None = None) -> None:
        self._threads = threads or settings.threads
        self._chunk_size = chunk_size or settings.chunk_size
        self._lock = threading.Lock()
        self._executor: ThreadPoolExecutor | None = None

    @property
    def chunk_size(self) -> int:
        return self._chunk_size

    def start(self) -> None:
        with self._lock:
            if self._executor is not None:
                return
            self._executor = ThreadPoolExecutor(
                max_workers=self._threads, thread_name_prefix="heatwalk-sampler"
            )

    def stop(self) -> None:
        with self._lock:
            executor, self._executor = self._executor, None
        if executor is not None:
            executor.shutdown(wait=True)

    def __enter__(self) -> "SampleWorkerPool":
        self.start()
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.stop()

    def map_chunks(self, job: ChunkJob[T], samples: int, seed: int) -> list[T]:
        """Apply ``job(rng, size)`` to every chunk of ``samples``; results follow chunk order."""
        sizes = chunk_sizes(samples, self._chunk_size)
        LOGGER.debug(
            "Running %s samples in %s chunks on %s threads", samples, len(sizes), self._threads
        )
        if self._threads == 1 or len(sizes) == 1:
            return [job(chunk_rng(seed, c), size) for c, size in enumerate(sizes)]
        owns_executor = self._executor is None
        if owns_executor:
            self.start()
        try:
            assert self._executor is not None
            futures: list[Future[T]] = [
                self._executor.submit(job, chunk_rng(seed, c), size) for c, size in enumerate(sizes)
            ]
            return [future.result() for future in futures]
        finally:
            if owns_executor:
                self.stop()


def create_sample_pool(threads: int | None = None, chunk_size: int | None = None) -> SampleWorkerPool:
    return SampleWorkerPool(threads=threads, chunk_size=chunk_size)
