from __future__ import annotations

from math import comb

import mpmath
import numpy as np
import pytest

from heatwalk.class_walk import (
    brute_force_S,
    brute_force_counts,
    class_graph_edges,
    count_S,
    count_geodesics,
    count_paths_between,
    path_count_table,
    transfer_matrix,
    transition_counts,
)
from heatwalk.errors import BudgetExceededError, DegreeMismatchError
from heatwalk.perm_core import CycleType, Permutation, partitions
from heatwalk.verification import S4_EDGES


def test_s4_class_graph_matches_quoted_counts() -> None:
    matrix = transition_counts(4)
    for (source, target), expected in S4_EDGES.items():
        assert matrix.count(CycleType(source), CycleType(target)) == expected, (source, target)
    edges = {(lam.parts, mu.parts): c for lam, mu, c in class_graph_edges(4)}
    assert edges == S4_EDGES


def test_s2_transitions() -> None:
    matrix = transition_counts(2)
    assert matrix.count(CycleType((1, 1)), CycleType((2,))) == 1
    assert matrix.count(CycleType((2,)), CycleType((1, 1))) == 1


def test_rows_sum_to_number_of_transpositions() -> None:
    for n in range(1, 8):
        matrix = transition_counts(n)
        for i, lam in enumerate(matrix.index):
            assert sum(matrix.counts[i]) == comb(n, 2), f"{lam} in S_{n}"


def test_position_rejects_foreign_partition() -> None:
    with pytest.raises(DegreeMismatchError):
        transition_counts(3).position(CycleType((2, 2)))


def test_quoted_path_counts() -> None:
    assert count_S(CycleType((1, 1, 1)), 1, 1) == 3
    assert count_S(CycleType((3,)), 4, 1) == 27
    for lam in partitions(4):
        assert count_S(lam, 0, 0) == 1, str(lam)
    assert count_S(CycleType((2,)), 3, 0) == 0
    assert count_S(CycleType((2,)), 3, 1) == 1
    assert count_S(CycleType((2,)), -1, 0) == 0


def test_identity_paths_of_odd_length() -> None:
    # from the identity in S_3 every odd path has defect (k+1)/2
    identity = CycleType((1, 1, 1))
    for l in range(1, 4):
        assert count_S(identity, 2 * l - 1, l) == 3 ** (2 * l - 1), f"l={l}"


def test_dynamic_programme_agrees_with_enumeration() -> None:
    for n in range(1, 5):
        for lam in partitions(n):
            table = path_count_table(lam, 5)
            for k in range(6):
                counts = brute_force_counts(lam.representative(), k)
                for d, expected in enumerate(counts):
                    assert table.S(k, d) == expected, f"{lam} k={k} d={d}"


def test_counts_outside_window_vanish() -> None:
    lam = CycleType((3, 1))
    table = path_count_table(lam, 8)
    for k in range(9):
        allowed = set(table.window(k))
        for d in range(k + 1):
            if d not in allowed:
                assert table.S(k, d) == 0, (k, d)
        assert sum(table.S(k, d) for d in allowed) == comb(4, 2) ** k


def test_paths_between_permutations() -> None:
    sigma = Permutation.parse("(1 2)(3)")
    assert count_paths_between(sigma, sigma, 0) == 1
    assert count_paths_between(sigma, Permutation.identity(3), 0) == 0
    assert count_paths_between(Permutation.identity(2), Permutation.parse("(1 2)"), 1) == 1
    identity = Permutation.identity(3)
    assert count_paths_between(identity, identity, 2, method="group") == 3
    assert count_paths_between(identity, identity, 2, method="character") == 3


def test_group_and_character_counts_agree() -> None:
    source = Permutation.parse("(1 2 3)(4)")
    for target in (Permutation.identity(4), Permutation.parse("(1 4)(2 3)"), Permutation.parse("(1 2 3 4)")):
        for k in range(5):
            assert count_paths_between(source, target, k, method="group") == count_paths_between(
                source, target, k, method="character"
            ), (str(target), k)


def test_geodesic_counts() -> None:
    assert count_geodesics(Permutation.parse("(1 2 3)")) == 3
    assert count_geodesics(Permutation.long_cycle(4)) == 16
    assert count_geodesics(Permutation.parse("(1 2)(3 4)")) == 2
    assert count_geodesics(Permutation.identity(3)) == 1


def test_enumeration_respects_budget() -> None:
    with pytest.raises(BudgetExceededError):
        brute_force_counts(Permutation.identity(4), 10, budget=100)
    assert brute_force_S(Permutation.identity(2), 2, 3) == 0


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    size = a.shape[0]
    out = np.empty((size, size), dtype=object)
    for i in range(size):
        for j in range(size):
            out[i, j] = mpmath.fsum(a[i, l] * b[l, j] for l in range(size))
    return out


def test_transfer_matrices_are_mutually_inverse() -> None:
    for n, t, N in ((2, 1.0, 1.0), (3, 0.7, 2.0)):
        plus = transfer_matrix(n, 1, t, N)
        minus = transfer_matrix(n, -1, t, N)
        product = _product(plus, minus)
        size = product.shape[0]
        for i in range(size):
            for j in range(size):
                expected = 1 if i == j else 0
                assert abs(float(product[i, j]) - expected) < 1e-12, (n, i, j)


def test_transfer_matrix_at_time_zero_is_identity() -> None:
    matrix = transfer_matrix(3, 1, 0.0, 2.0)
    for i in range(6):
        for j in range(6):
            assert float(matrix[i, j]) == (1.0 if i == j else 0.0)


def test_transfer_matrix_rejects_bad_sign() -> None:
    with pytest.raises(ValueError):
        transfer_matrix(2, 0, 1.0, 1.0)
