from __future__ import annotations

import math

import pytest

from heatwalk.errors import BudgetExceededError
from heatwalk.expansion import leading_slice
from heatwalk.free_prob import (
    Word,
    chi_residual,
    free_cumulant,
    free_cumulant_by_geodesics,
    leading_order_map,
    limit_moment,
    limit_moment_poly,
    moment_from_cumulants,
    word_cumulant,
    word_moment,
)
from heatwalk.noncross import enumerate_nc
from heatwalk.perm_core import CycleType, Permutation


def test_limit_moments() -> None:
    assert limit_moment(1, 0.8) == pytest.approx(math.exp(-0.4))
    assert limit_moment(2, 1.0) == pytest.approx(0.0, abs=1e-15)
    for n in range(1, 10):
        assert limit_moment(n, 0.0) == 1.0, f"n={n}"
    with pytest.raises(ValueError):
        limit_moment(0, 1.0)


def test_limit_moment_is_leading_slice_of_long_cycle() -> None:
    for n in range(1, 7):
        assert limit_moment_poly(n) == leading_slice(CycleType((n,))), f"n={n}"


def test_large_order_moments_survive_cancellation() -> None:
    # |φ(u_t^n)| ≤ 1 even where the alternating sum has huge terms
    for n in (30, 45, 60):
        assert abs(limit_moment(n, 3.0)) <= 1.0, f"n={n}"


def test_free_cumulants() -> None:
    t = 0.7
    assert free_cumulant(1, t) == pytest.approx(math.exp(-t / 2))
    assert free_cumulant(2, t) == pytest.approx(-t * math.exp(-t))
    sigma = Permutation.parse("(1 2)(3 4)")
    assert free_cumulant(sigma, t) == pytest.approx(free_cumulant(2, t) ** 2)
    assert free_cumulant_by_geodesics(sigma, t) == pytest.approx(free_cumulant(sigma, t))
    for m in range(1, 7):
        assert free_cumulant_by_geodesics(Permutation.long_cycle(m), t) == pytest.approx(
            free_cumulant(m, t)
        ), f"m={m}"


def test_moment_cumulant_relation() -> None:
    for n in range(1, 10):
        for t in (0.2, 1.0, 2.5):
            assert moment_from_cumulants(n, t) == pytest.approx(limit_moment(n, t), abs=1e-10), (n, t)
    with pytest.raises(BudgetExceededError):
        moment_from_cumulants(10, 1.0, n_max=8)


def test_leading_order_map() -> None:
    terms = leading_order_map(Permutation.identity(3))
    assert len(terms) == 1
    assert terms[0].target.is_identity()
    assert terms[0](0.4) == pytest.approx(math.exp(-0.6))
    terms = {str(term.target): term for term in leading_order_map(Permutation.parse("(1 2)"))}
    assert set(terms) == {"(1 2)", "(1)(2)"}
    assert terms["(1)(2)"](0.4) == pytest.approx(math.exp(-0.4) * -0.4)
    assert sum(term(0.9) for term in leading_order_map(Permutation.long_cycle(4))) == pytest.approx(
        limit_moment(4, 0.9)
    )


def test_word_parsing() -> None:
    word = Word.parse("a(0.5) b(1) a(0.5)")
    assert word.letters == ("a", "b", "a")
    assert word.times == {"a": 0.5, "b": 1.0}
    assert str(word) == "a(0.5) b(1) a(0.5)"
    with pytest.raises(ValueError):
        Word.parse("a(0.5) a(0.7)")
    with pytest.raises(ValueError):
        Word.parse("a(0.5)^-1")
    with pytest.raises(ValueError):
        Word.parse("")
    with pytest.raises(ValueError):
        Word.parse("a(-1)")


def test_word_moments() -> None:
    assert word_moment(Word.parse("a(0.5) a(0.5) a(0.5)")) == pytest.approx(limit_moment(3, 0.5))
    assert word_moment(Word.parse("a(0.3) b(0.7)")) == pytest.approx(math.exp(-0.5))
    a, b = 0.4, 1.1
    phi_a, phi_b = limit_moment(1, a), limit_moment(1, b)
    expected = limit_moment(2, a) * phi_b**2 + phi_a**2 * limit_moment(2, b) - phi_a**2 * phi_b**2
    assert word_moment(Word.parse(f"a({a}) b({b}) a({a}) b({b})")) == pytest.approx(expected)
    # traciality
    assert word_moment(Word.parse("a(0.4) a(0.4) b(1) c(2)")) == pytest.approx(
        word_moment(Word.parse("b(1) c(2) a(0.4) a(0.4)"))
    )


def test_mixed_cumulants_vanish() -> None:
    assert word_cumulant(Word.parse("a(0.3) b(0.7)")) == pytest.approx(0.0, abs=1e-12)
    assert word_cumulant(Word.parse("a(0.3) b(0.7) a(0.3) b(0.7)")) == pytest.approx(0.0, abs=1e-12)
    assert word_cumulant(Word.parse("a(0.3) a(0.3)")) == pytest.approx(free_cumulant(2, 0.3))


def test_word_length_budget() -> None:
    with pytest.raises(BudgetExceededError):
        word_moment(Word.parse(" ".join(["a(1)", "b(1)"] * 5)), max_length=8)


def test_s_transform_residual() -> None:
    assert chi_residual(1.0, 0) == 0
    assert abs(chi_residual(0.0, 0.05)) < 1e-10
    assert abs(chi_residual(1.0, 0.05)) < 1e-8
    assert abs(chi_residual(2.0, 0.03j)) < 1e-8
    with pytest.raises(ValueError):
        chi_residual(1.0, 0.5)


def test_single_letter_word_cumulants() -> None:
    for r in range(1, 7):
        word = Word.parse(" ".join(["a(0.6)"] * r))
        assert word_cumulant(word) == pytest.approx(free_cumulant(r, 0.6), abs=1e-12), f"r={r}"


def test_word_cumulants_sum_to_the_moment_over_nc() -> None:
    word = Word.parse("a(0.5) b(1.2) a(0.5) a(0.5) b(1.2)")
    total = 0.0
    for partition in enumerate_nc(len(word)):
        product = 1.0
        for block in partition.blocks:
            product *= word_cumulant(Word(tuple(word.letters[i - 1] for i in block), word.times))
        total += product
    assert total == pytest.approx(word_moment(word), abs=1e-12)


def test_word_cumulant_budget() -> None:
    with pytest.raises(BudgetExceededError):
        word_cumulant(Word.parse(" ".join(["a(1)"] * 13)))
    assert word_cumulant(Word.parse(" ".join(["a(0.2)", "b(0.3)"] * 5))) == pytest.approx(0.0, abs=1e-10)
