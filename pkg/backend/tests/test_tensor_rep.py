from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from heatwalk.errors import BudgetExceededError, DegreeMismatchError
from heatwalk.models import Flavor, Group
from heatwalk.perm_core import Permutation, all_permutations, compose
from heatwalk.tensor_rep import (
    BrauerDiagram,
    TensorOperator,
    brauer_compose,
    casimir_identity_check,
    commutation_check,
    enumerate_brauer,
    invertible_elements,
    laplacian_action_check,
    rho,
    su_shift_check,
)


def test_brauer_monoid_sizes() -> None:
    assert [len(enumerate_brauer(n)) for n in range(1, 5)] == [1, 3, 15, 105]
    invertible = invertible_elements(3)
    assert len(invertible) == 6
    assert all(beta.is_permutation() for beta in invertible)


def test_bracket_squares_to_itself_with_a_loop() -> None:
    bracket = BrauerDiagram.bracket(1, 2, 2)
    assert brauer_compose(bracket, bracket) == (bracket, 1)
    assert bracket.loop_count() == 1
    assert bracket.top_pairs() == ((1, 2),)
    with pytest.raises(ValueError):
        BrauerDiagram.bracket(2, 2, 3)


def test_permutations_form_a_submonoid() -> None:
    identity = BrauerDiagram.identity(3)
    for beta in enumerate_brauer(3):
        assert brauer_compose(identity, beta) == (beta, 0), str(beta)
        assert brauer_compose(beta, identity) == (beta, 0), str(beta)
    elements = list(all_permutations(3))
    for sigma in elements:
        for pi in elements:
            composed, loops = brauer_compose(
                BrauerDiagram.from_permutation(sigma), BrauerDiagram.from_permutation(pi)
            )
            assert loops == 0
            assert composed.to_permutation() == compose(sigma, pi), (str(sigma), str(pi))


def test_brauer_composition_is_associative() -> None:
    elements = enumerate_brauer(3)
    a, b = elements[4], elements[9]
    for c in elements:
        ab, loops_ab = brauer_compose(a, b)
        left, loops_left = brauer_compose(ab, c)
        bc, loops_bc = brauer_compose(b, c)
        right, loops_right = brauer_compose(a, bc)
        assert left == right, str(c)
        assert loops_ab + loops_left == loops_bc + loops_right, str(c)


def test_degree_mismatch() -> None:
    with pytest.raises(DegreeMismatchError):
        brauer_compose(BrauerDiagram.identity(2), BrauerDiagram.identity(3))


def test_swap_matrix() -> None:
    swap = rho(Permutation.parse("(1 2)"), 2)
    expected = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    assert np.array_equal(swap.as_float(), expected)


def test_trace_counts_loops() -> None:
    for beta in enumerate_brauer(3):
        for N in (1, 2, 3):
            assert rho(beta, N).trace() == N ** beta.loop_count(), (str(beta), N)
    assert rho(BrauerDiagram.bracket(1, 2, 2), 2).trace() == 2


def test_representation_is_multiplicative_up_to_loops() -> None:
    N = 2
    for n in (2, 3):
        elements = enumerate_brauer(n)
        for a in elements:
            for b in elements:
                composed, loops = brauer_compose(a, b)
                assert rho(a, N) @ rho(b, N) == rho(composed, N).scaled(N**loops), (str(a), str(b))


def test_rho_guards() -> None:
    with pytest.raises(BudgetExceededError):
        rho(Permutation.identity(3), 20)
    with pytest.raises(ValueError):
        rho(BrauerDiagram.bracket(1, 2, 2), 3, Flavor.SYMPLECTIC)


def test_tensor_operator_arithmetic() -> None:
    half = TensorOperator.scalar(1, 2, Fraction(1, 2))
    assert half + half == TensorOperator.scalar(1, 2, 1)
    assert (half - half).trace() == 0
    assert half.scaled(4).entry(1, 1) == 2


@pytest.mark.parametrize("group", [Group.U, Group.SO, Group.SP])
def test_casimir_identities_hold(group: Group) -> None:
    for n in (1, 2, 3):
        for N in (1, 2):
            report = casimir_identity_check(group, n, N, strict=True)
            assert report.holds, report.model_dump()
            assert report.max_deviation == 0.0
            assert report.offending_entry is None


def test_casimir_report_fields() -> None:
    report = casimir_identity_check(Group.SP, 2, 1)
    assert report.dimension == 4
    assert report.scalar == "-3"
    assert casimir_identity_check(Group.SU, 2, 2).group == Group.U
    with pytest.raises(ValueError):
        casimir_identity_check(Group.U, 0, 2)


def test_special_unitary_shift() -> None:
    for n in (1, 2, 3):
        for N in (1, 2, 3):
            if N**n <= 64:
                assert su_shift_check(n, N), (n, N)


def test_laplacian_on_power_sums() -> None:
    identity = Permutation.identity(2)
    assert laplacian_action_check(identity, 2, unitaries=[np.eye(2, dtype=complex)]) < 1e-12
    assert laplacian_action_check(Permutation.parse("(1 2)"), 2, samples=10) < 1e-10
    assert laplacian_action_check(Permutation.parse("(1 2 3)"), 2, samples=3, seed=4) < 1e-10


def test_place_permutations_commute_with_tensor_powers() -> None:
    assert commutation_check(Permutation.parse("(1 2 3)"), 2) < 1e-12
    assert commutation_check(Permutation.parse("(1 3)(2)"), 3, samples=2) < 1e-12
