from __future__ import annotations

import threading

import numpy as np

from heatwalk.workers import SampleWorkerPool, chunk_rng, chunk_sizes, create_sample_pool


def test_chunk_sizes() -> None:
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert chunk_sizes(8, 4) == [4, 4]
    assert chunk_sizes(3, 10) == [3]


def test_chunk_streams_are_reproducible_and_distinct() -> None:
    first = chunk_rng(7, 0).standard_normal(5)
    assert np.array_equal(first, chunk_rng(7, 0).standard_normal(5))
    assert not np.array_equal(first, chunk_rng(7, 1).standard_normal(5))
    assert not np.array_equal(first, chunk_rng(8, 0).standard_normal(5))


def test_results_follow_chunk_order() -> None:
    def job(rng: np.random.Generator, size: int) -> tuple[int, float]:
        return size, float(rng.random())

    sequential = SampleWorkerPool(threads=1, chunk_size=3).map_chunks(job, 10, seed=2)
    with create_sample_pool(threads=4, chunk_size=3) as pool:
        threaded = pool.map_chunks(job, 10, seed=2)
    assert [size for size, _ in sequential] == [3, 3, 3, 1]
    assert sequential == threaded


def test_jobs_run_on_named_worker_threads() -> None:
    names: set[str] = set()

    def job(rng: np.random.Generator, size: int) -> int:
        names.add(threading.current_thread().name)
        return size

    pool = SampleWorkerPool(threads=2, chunk_size=1)
    assert sum(pool.map_chunks(job, 6, seed=0)) == 6
    assert names and all(name.startswith("heatwalk-sampler") for name in names)


def test_stop_is_idempotent() -> None:
    pool = SampleWorkerPool(threads=2)
    pool.start()
    pool.start()
    pool.stop()
    pool.stop()
