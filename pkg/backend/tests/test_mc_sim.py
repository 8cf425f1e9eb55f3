from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from heatwalk.mc_sim import (
    compare,
    conjugation_check,
    cycle_values,
    estimate_moment,
    exact_moment,
    martingale_check,
    moment_check,
    sample_brownian,
    summarize,
    variance_slope,
    weak_order_check,
)
from heatwalk.perm_core import CycleType, Permutation
from heatwalk.random_matrix import gaussian_u_algebra, haar_unitary
from heatwalk.schemas import SimConfig
from heatwalk.workers import SampleWorkerPool


def small_config(**overrides: object) -> SimConfig:
    values: dict[str, object] = {"N": 2, "t": 1.0, "steps": 40, "samples": 3000, "seed": 11, "chunk_size": 500}
    values.update(overrides)
    return SimConfig(**values)


def test_gaussian_generator_lies_in_the_lie_algebra() -> None:
    rng = np.random.default_rng(0)
    g = gaussian_u_algebra(rng, 3, 20000)
    assert np.allclose(np.conj(np.swapaxes(g, -1, -2)), -g)
    # E[G²] = -N·Id for the inner product -Tr(XY)
    mean_square = (g @ g).mean(axis=0)
    assert np.allclose(mean_square, -3 * np.eye(3), atol=0.1)


def test_haar_unitary_is_unitary() -> None:
    u = haar_unitary(np.random.default_rng(1), 5)
    assert np.allclose(np.conj(u.T) @ u, np.eye(5), atol=1e-12)


def test_brownian_paths_stay_unitary() -> None:
    b = sample_brownian(small_config(N=4, steps=200))
    assert np.abs(np.conj(b.T) @ b - np.eye(4)).max() < 1e-10
    assert np.array_equal(sample_brownian(small_config(t=0.0)), np.eye(2))


def test_cycle_values_at_identity() -> None:
    matrices = np.broadcast_to(np.eye(3, dtype=complex), (4, 3, 3))
    assert np.allclose(cycle_values(matrices, CycleType((2, 1))), 1.0)


def test_summary_and_comparison() -> None:
    single = summarize(np.array([0.5 + 0j]))
    assert single.stderr == 0.0
    assert compare(single, 0.5).sigmas_away == 0.0
    assert math.isinf(compare(single, 0.4).sigmas_away)
    result = summarize(np.array([1.0, 2.0, 3.0, 4.0]))
    assert result.mean == 2.5
    assert result.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)


def test_imaginary_noise_widens_the_error_bar() -> None:
    real = summarize(np.array([1.0, 1.0, 1.0, 1.0]))
    noisy = summarize(np.array([1 + 1j, 1 - 1j, 1 + 1j, 1 - 1j]))
    assert real.stderr == 0.0
    assert noisy.mean == 1.0
    assert noisy.mean_imag == 0.0
    assert noisy.stderr == pytest.approx(math.sqrt(4 / 3) / 2)
    assert abs(compare(noisy, 1.5).sigmas_away) < 1


def test_estimates_do_not_depend_on_thread_count() -> None:
    cfg = small_config(samples=1200, steps=10)
    lam = CycleType((2,))
    single = estimate_moment(lam, cfg, pool=SampleWorkerPool(threads=1, chunk_size=300))
    with SampleWorkerPool(threads=3, chunk_size=300) as pool:
        threaded = estimate_moment(lam, cfg, pool=pool)
    assert single == threaded


@pytest.mark.parametrize("parts", [(1,), (2,), (1, 1)])
def test_moment_estimates_match_exact_values(parts: tuple[int, ...]) -> None:
    check = moment_check(CycleType(parts), small_config())
    assert check.within(4), check.model_dump()


def test_raw_time_runs_for_t() -> None:
    cfg = small_config(t=0.4, raw_time=True)
    assert cfg.horizon == 0.4
    assert exact_moment(CycleType((1,)), cfg) == pytest.approx(math.exp(-0.4 * 2 / 2))
    check = moment_check(CycleType((1,)), cfg)
    assert check.within(4), check.model_dump()


def test_transposition_walk_martingale() -> None:
    sigma = Permutation.parse("(1 2)(3)")
    check = martingale_check(sigma, 2, 0.2, 3000, seed=5, steps=20)
    assert check.exact == pytest.approx(math.exp(-(2 * 3 + 6) * 0.2 / 2) * 4)
    assert check.within(4), check.model_dump()


def test_conjugation_invariance() -> None:
    check = conjugation_check(CycleType((2,)), small_config(samples=2000))
    assert check.within(4), check.model_dump()


def test_halving_the_step_changes_little() -> None:
    check = weak_order_check(CycleType((1,)), small_config(samples=2000, steps=10))
    assert check.within(4), check.model_dump()


def test_variance_decays_like_inverse_square() -> None:
    slope = variance_slope(CycleType((1,)), [2, 4, 8], 1.0, small_config(samples=1500, steps=10))
    assert -2.6 < slope < -1.4


def test_trace_file(tmp_path) -> None:
    path = tmp_path / "trace.csv"
    cfg = small_config(samples=50, steps=5, trace_path=str(path))
    result = estimate_moment(CycleType((1,)), cfg)
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["sample", "real", "imag"]
    assert len(rows) == 51
    assert np.mean([float(row[1]) for row in rows[1:]]) == pytest.approx(result.mean)


def test_config_validation() -> None:
    with pytest.raises(ValueError):
        SimConfig(N=0, t=1.0)
    with pytest.raises(ValueError):
        SimConfig(N=2, t=-1.0)
