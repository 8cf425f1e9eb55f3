from __future__ import annotations

import pytest

from heatwalk.errors import DegreeMismatchError
from heatwalk.perm_core import (
    CycleType,
    Permutation,
    all_permutations,
    compose,
    leq_abs,
    partitions,
    transposition_pairs,
)


def perm(text: str, n: int | None = None) -> Permutation:
    return Permutation.parse(text, n)


def test_compose_applies_right_factor_first() -> None:
    assert compose(perm("(1 2)"), perm("(1 2)")).is_identity()
    assert compose(perm("(1 2)", 3), perm("(1 2 3)")) == perm("(2 3)", 3)
    sigma = perm("(1 3 4)(2 5)")
    assert compose(Permutation.identity(5), sigma) == sigma
    assert compose(sigma, Permutation.identity(5)) == sigma


def test_compose_is_associative_on_s4() -> None:
    elements = list(all_permutations(4))
    a, b = perm("(1 2 3)", 4), perm("(2 4)", 4)
    for c in elements:
        assert compose(compose(a, b), c) == compose(a, compose(b, c)), str(c)


def test_compose_rejects_mixed_degrees() -> None:
    with pytest.raises(DegreeMismatchError):
        compose(perm("(1 2)"), perm("(1 2 3)"))


def test_cycle_type_and_norm() -> None:
    assert perm("(1 2 3)(4)").cycle_type() == CycleType((3, 1))
    assert Permutation.identity(5).cycle_type() == CycleType((1, 1, 1, 1, 1))
    assert perm("(1 2)(3 4)").cycle_type() == CycleType((2, 2))
    assert Permutation.identity(6).norm == 0
    assert perm("(1 2)(3 4)").norm == 2
    assert Permutation.long_cycle(7).norm == 6


def test_absolute_order() -> None:
    sigma = perm("(1 2 3)")
    assert leq_abs(Permutation.identity(3), sigma)
    assert leq_abs(perm("(1 2)", 3), sigma)
    assert not leq_abs(perm("(1 2)", 4), perm("(3 4)", 4))


def test_parse_and_print_cycle_notation() -> None:
    sigma = perm("(1,3)(2)")
    assert sigma.images == (3, 2, 1)
    assert str(sigma) == "(1 3)(2)"
    assert perm("id", 3).is_identity()
    with pytest.raises(ValueError):
        perm("(1 2")
    with pytest.raises(ValueError):
        perm("id")
    with pytest.raises(DegreeMismatchError):
        perm("(1 5)", 3)
    with pytest.raises(ValueError):
        perm("(1 2)(2 3)")


def test_cycle_type_parsing_sorts_parts() -> None:
    assert CycleType.parse("1,3") == CycleType((3, 1))
    assert CycleType.parse("[2 2 1]").n == 5
    with pytest.raises(ValueError):
        CycleType.parse("")
    with pytest.raises(ValueError):
        CycleType((1, 2))


def test_class_sizes_add_up_to_n_factorial() -> None:
    for n in range(1, 7):
        total = sum(lam.class_size() for lam in partitions(n))
        expected = 1
        for i in range(2, n + 1):
            expected *= i
        assert total == expected, f"n={n}"
    assert CycleType((2, 1, 1)).class_size() == 6
    assert len(partitions(4)) == 5


def test_representative_has_requested_class() -> None:
    for lam in partitions(6):
        assert lam.representative().cycle_type() == lam, str(lam)


def test_transposition_pairs() -> None:
    assert transposition_pairs(3) == [(1, 2), (1, 3), (2, 3)]
    assert transposition_pairs(1) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_transposition_changes_cycle_count_by_one(n: int) -> None:
    taus = [Permutation.from_cycles([pair], n) for pair in transposition_pairs(n)]
    for sigma in all_permutations(n):
        for tau in taus:
            step = compose(sigma, tau).cycle_count - sigma.cycle_count
            assert step in (-1, 1), f"{sigma} {tau}"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_norm_triangle_inequality(n: int) -> None:
    elements = list(all_permutations(n))
    for sigma in elements:
        for pi in elements:
            assert compose(sigma, pi).norm <= sigma.norm + pi.norm, f"{sigma} {pi}"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_absolute_order_is_reflexive_and_antisymmetric(n: int) -> None:
    elements = list(all_permutations(n))
    for a in elements:
        assert leq_abs(a, a)
        for b in elements:
            if a != b and leq_abs(a, b):
                assert not leq_abs(b, a), f"{a} {b}"


@pytest.mark.parametrize("n", [2, 3, 4])
def test_absolute_order_is_transitive(n: int) -> None:
    elements = list(all_permutations(n))
    below = {a: [b for b in elements if leq_abs(a, b)] for a in elements}
    for a in elements:
        for b in below[a]:
            for c in below[b]:
                assert leq_abs(a, c), f"{a} {b} {c}"
