from __future__ import annotations

import math

import pytest
import sympy as sp

from heatwalk import closed_forms
from heatwalk.errors import PrecisionError
from heatwalk.expansion import (
    covariance_expansion,
    evaluate,
    factorization_defect,
    fourier_moment,
    moment_expansion,
    moment_value,
    required_d_max,
    shuffle_factorize,
    t,
    variance_expansion,
)
from heatwalk.models import Group
from heatwalk.perm_core import CycleType, partitions
from heatwalk.verification import N4_SLICES


def ct(*parts: int) -> CycleType:
    return CycleType(parts)


def test_single_trace_is_pure_exponential() -> None:
    expansion = moment_expansion(ct(1), d_max=3)
    assert expansion.slice(0).as_expr() == 1
    for d in range(1, 4):
        assert expansion.slice(d).is_zero, f"d={d}"
    assert math.isclose(moment_value(ct(1), 3, 1.0).value, math.exp(-0.5), rel_tol=1e-14)


def test_quoted_degree_four_slices() -> None:
    for parts, slices in N4_SLICES.items():
        expansion = moment_expansion(CycleType(parts), d_max=2)
        for d, expected in slices.items():
            difference = sp.expand(expansion.slice(d).as_expr() - expected)
            assert difference == 0, (parts, d, difference)


def test_slices_match_closed_form_series() -> None:
    for lam in partitions(3):
        series = closed_forms.rescaled_series(lam, 6)
        expansion = moment_expansion(lam, d_max=4)
        for k, coefficient in series.items():
            rebuilt = sum(
                expansion.slice(d).as_expr().coeff(t, k) * closed_forms.N ** (-2 * d) for d in range(5)
            )
            assert sp.simplify(sp.expand(rebuilt - coefficient)) == 0, (str(lam), k)


def test_evaluate_matches_closed_forms() -> None:
    assert math.isclose(moment_value(ct(2), 1, 1.0).value, math.exp(-2.0), rel_tol=1e-12)
    assert math.isclose(
        moment_value(ct(3), 2, 0.7).value, closed_forms.closed_form(ct(3), 2, 0.7), abs_tol=1e-10
    )
    assert math.isclose(
        moment_value(ct(2, 1), 2, 0.4).value, closed_forms.closed_form(ct(2, 1), 2, 0.4), abs_tol=1e-12
    )


def test_every_moment_is_one_at_time_zero() -> None:
    for lam in partitions(4):
        assert moment_value(lam, 3, 0.0).value == pytest.approx(1.0, abs=1e-15), str(lam)


def test_special_unitary_factor() -> None:
    lam = ct(2, 1)
    u = moment_value(lam, 3, 0.5).value
    su = moment_value(lam, 3, 0.5, Group.SU).value
    assert su == pytest.approx(u * math.exp(9 * 0.5 / (2 * 9)), rel=1e-12)
    assert closed_forms.closed_form(lam, 3, 0.5, Group.SU) == pytest.approx(su, rel=1e-12)


def test_fourier_oracle_agrees() -> None:
    assert fourier_moment(ct(1), 3, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-14)
    for lam in partitions(4):
        for N in (1, 2, 3):
            for group in (Group.U, Group.SU):
                assert fourier_moment(lam, N, 0.6, group) == pytest.approx(
                    moment_value(lam, N, 0.6, group).value, abs=1e-12
                ), (str(lam), N, group)
    expansion = moment_expansion(ct(2), d_max=8)
    assert evaluate(expansion, 2, 0.5).value == pytest.approx(moment_value(ct(2), 2, 0.5).value, abs=1e-12)
    with pytest.raises(ValueError):
        fourier_moment(ct(2), 2.5, 1.0)


def test_evaluation_guards() -> None:
    expansion = moment_expansion(ct(2, 2), d_max=0)
    with pytest.raises(PrecisionError):
        evaluate(expansion, 1, 2.0)
    with pytest.raises(ValueError):
        evaluate(expansion, 0.5, 1.0)
    with pytest.raises(ValueError):
        evaluate(expansion, 2, -1.0)
    with pytest.raises(ValueError):
        moment_expansion(ct(2), Group.SO)


def test_non_integer_dimension_is_flagged() -> None:
    lam = ct(2)
    d_max = required_d_max(lam.n, lam.length, 2.5, 0.3)
    result = evaluate(moment_expansion(lam, d_max=d_max), 2.5, 0.3)
    assert result.extrapolated
    assert result.value == pytest.approx(closed_forms.closed_form(lam, 2.5, 0.3), abs=1e-12)


def test_defect_zero_factorizes_over_cycles() -> None:
    assert shuffle_factorize(ct(2, 2), 2) == 2
    assert shuffle_factorize(ct(1, 1, 1, 1), 0) == 1
    assert shuffle_factorize(ct(1, 1, 1, 1), 1) == 0
    for lam in partitions(5):
        assert factorization_defect(lam).is_zero, str(lam)


def test_variance_has_no_leading_slice() -> None:
    variance = variance_expansion(ct(1), 2)
    assert variance.slice(0).is_zero
    assert not variance.slice(1).is_zero
    for lam in partitions(3):
        assert variance_expansion(lam, 1).slice(0).is_zero, str(lam)
    covariance = covariance_expansion(ct(2), ct(1), 1)
    assert covariance.slice(0).is_zero
    assert evaluate(variance_expansion(ct(2), 6), 3, 0.0).value == pytest.approx(0.0, abs=1e-15)
