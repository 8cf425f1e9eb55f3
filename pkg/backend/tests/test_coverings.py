from __future__ import annotations

import math

import numpy as np
import pytest

from heatwalk.coverings import (
    analytic_expectation,
    euler_char,
    genus_estimator,
    genus_target,
    sample_covering,
)
from heatwalk.errors import DegreeMismatchError, MalformedPathError
from heatwalk.perm_core import CycleType, Permutation, partitions


def test_sampled_covering_is_consistent() -> None:
    rng = np.random.default_rng(3)
    lam = CycleType((2, 1))
    for _ in range(50):
        sample = sample_covering(3, lam, 0.8, rng)
        assert sample.sigma_start.cycle_type() == lam
        assert sample.k == len(sample.taus)
        assert sample.chi == euler_char(sample.sigma_start, sample.taus)
        assert (lam.length - sample.chi) % 2 == 0
        assert 0 <= sample.defect <= sample.k
        assert sample.sign_weight == (-1) ** sample.k


def test_branch_point_count_is_poisson() -> None:
    rng = np.random.default_rng(21)
    draws = 4000
    ks = [sample_covering(3, CycleType((1, 1, 1)), 2.0, rng).k for _ in range(draws)]
    # mean t·binom(n, 2) = 6, variance 6
    assert abs(np.mean(ks) - 6.0) < 4 * math.sqrt(6.0 / draws)
    assert np.var(ks) == pytest.approx(6.0, rel=0.15)


def test_no_branch_points_at_time_zero() -> None:
    sample = sample_covering(4, CycleType((4,)), 0.0, np.random.default_rng(0))
    assert sample.k == 0
    assert sample.sigma_end == sample.sigma_start
    assert sample.chi == 1


def test_class_must_match_degree() -> None:
    with pytest.raises(DegreeMismatchError):
        sample_covering(4, CycleType((2, 1)), 1.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_covering(3, CycleType((2, 1)), -1.0, np.random.default_rng(0))


def test_euler_characteristic_of_paths() -> None:
    start = Permutation.parse("(1 2)(3)")
    path = [start, Permutation.identity(3), Permutation.parse("(1 3)(2)")]
    assert euler_char(path) == 2 - 2
    assert euler_char(start, [(1, 2), (1, 3)]) == 0
    assert euler_char([start]) == 2


def test_malformed_paths_are_rejected() -> None:
    with pytest.raises(MalformedPathError):
        euler_char([])
    with pytest.raises(MalformedPathError):
        euler_char([Permutation.identity(3), Permutation.parse("(1 2 3)")])
    with pytest.raises(MalformedPathError):
        euler_char(Permutation.identity(3), [(1, 1)])
    with pytest.raises(MalformedPathError):
        euler_char(Permutation.identity(3), [(1, 4)])


def test_analytic_expectation_matches_target() -> None:
    for n in (2, 3):
        for lam in partitions(n):
            for N in (1, 2, 4):
                target = genus_target(lam, N, 0.3)
                assert analytic_expectation(n, lam, N, 0.3) == pytest.approx(target, rel=1e-9), (str(lam), N)


def test_target_at_time_zero_counts_start_cycles() -> None:
    assert genus_target(CycleType((2, 1)), 3, 0.0) == pytest.approx(9.0)
    assert math.isclose(analytic_expectation(3, CycleType((2, 1)), 3, 0.0), 9.0)


def test_monte_carlo_estimator() -> None:
    check = genus_estimator(3, CycleType((3,)), 2, 0.3, 20000, seed=1)
    assert check.exact == pytest.approx(genus_target(CycleType((3,)), 2, 0.3))
    assert check.within(4), check.model_dump()
