"""Cross-oracle and identity suites; ``verify-all`` runs every one of them.

Each suite returns a :class:`SuiteResult`. ``quick`` shrinks the grids and the Monte
Carlo budgets so the whole run fits in a test session.
"""

from __future__ import annotations

import logging
import math
from math import comb
from typing import Callable

import numpy as np
import sympy as sp

from . import closed_forms, expansion
from .class_walk import brute_force_counts, count_S, path_count_table, transfer_matrix, transition_counts
from .coverings import analytic_expectation, genus_estimator, genus_target
from .errors import HeatwalkError
from .expansion import factorization_defect, fourier_moment, moment_expansion, moment_value, variance_expansion
from .free_prob import (
    Word,
    chi_residual,
    limit_moment,
    limit_moment_poly,
    moment_from_cumulants,
    word_cumulant,
)
from .mc_sim import conjugation_check, martingale_check, moment_check, variance_slope
from .models import Group
from .noncross import (
    NCPartition,
    count_by_type,
    count_increasing_paths,
    enumerate_nc,
    kreweras,
    kreweras_by_interleaving,
    s_cycle_zero_defect,
)
from .perm_core import CycleType, Permutation, partitions
from .schemas import SimConfig, SuiteResult
from .sym_char import (
    c_np,
    char_sum_coefficient,
    cnp_egf_coefficients,
    cycle_generating_function,
    cycle_generating_series,
    jm_identity_check,
    s_ncycle_closed,
)
from .tensor_rep import casimir_identity_check, su_shift_check
from .workers import SampleWorkerPool

LOGGER = logging.getLogger(__name__)

_T = expansion.t

# quoted slices for n = 4, as {d: e^{2t}-coefficient polynomial}
N4_SLICES: dict[tuple[int, ...], dict[int, sp.Expr]] = {
    (1, 1, 1, 1): {1: -6 * _T + 3 * _T**2, 2: 15 * _T**2 - 20 * _T**3 + 5 * _T**4},
    (4,): {
        0: 1 - 6 * _T + 8 * _T**2 - sp.Rational(8, 3) * _T**3,
        1: 10 * _T**2
        - sp.Rational(58, 3) * _T**3
        + sp.Rational(71, 4) * _T**4
        - sp.Rational(16, 3) * _T**5,
    },
}

# Cayley graph of S_4 modulo conjugation
S4_EDGES: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {
    ((1, 1, 1, 1), (2, 1, 1)): 6,
    ((2, 1, 1), (1, 1, 1, 1)): 1,
    ((2, 1, 1), (3, 1)): 4,
    ((2, 1, 1), (2, 2)): 1,
    ((3, 1), (2, 1, 1)): 3,
    ((3, 1), (4,)): 3,
    ((4,), (3, 1)): 4,
    ((4,), (2, 2)): 2,
    ((2, 2), (2, 1, 1)): 2,
    ((2, 2), (4,)): 4,
}

KREWERAS_EXAMPLE = ("{1,3,12}{2}{4,8,9}{5,6,7}{10,11}", "{1,2}{3,9,11}{4,7}{5}{6}{8}{10}{12}")


class _Suite:
    def __init__(self, name: str) -> None:
        self.name = name
        self.checks = 0
        self.failures: list[str] = []
        self.details: dict[str, float] = {}

    def check(self, condition: bool, label: str) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(label)

    def worst(self, key: str, value: float) -> None:
        self.details[key] = max(self.details.get(key, 0.0), float(value))

    def result(self) -> SuiteResult:
        if self.failures:
            LOGGER.warning("%s: %s of %s checks failed", self.name, len(self.failures), self.checks)
        return SuiteResult(
            name=self.name,
            passed=not self.failures,
            checks=self.checks,
            failures=self.failures,
            details=self.details,
        )


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def worked_examples(quick: bool = False) -> SuiteResult:
    suite = _Suite("worked-examples")
    order = 10 if quick else 20
    for parts in closed_forms.CLOSED_FORMS:
        lam = CycleType(parts)
        series = closed_forms.rescaled_series(lam, order)
        expansion_ = moment_expansion(lam, Group.U, (order + lam.length - 1) // 2)
        slices = [expansion_.slice(d) for d in range(expansion_.d_max + 1)]
        for k in range(order + 1):
            ours = sum(
                (poly.coeff_monomial(_T**k) * closed_forms.N ** (-2 * d) for d, poly in enumerate(slices)),
                sp.Integer(0),
            )
            suite.check(sp.expand(series[k] - ours) == 0, f"{lam} t^{k}")
    for parts, quoted in N4_SLICES.items():
        lam = CycleType(parts)
        expansion_ = moment_expansion(lam, Group.U, max(quoted))
        for d, polynomial in quoted.items():
            suite.check(
                expansion_.slice(d) == sp.Poly(polynomial, _T, domain=sp.QQ), f"{lam} slice d={d}"
            )
    return suite.result()


def triple_oracle(quick: bool = False) -> SuiteResult:
    suite = _Suite("triple-oracle")
    brute_n, brute_k = (4, 4) if quick else (5, 6)
    char_n, char_k = (5, 6) if quick else (6, 8)
    closed_n, closed_k = (5, 7) if quick else (7, 9)
    for n in range(1, char_n + 1):
        for lam in partitions(n):
            sigma = lam.representative()
            for k in range(char_k + 1):
                walk = list(path_count_table(lam, k).table[k])
                characters = [char_sum_coefficient(lam, k, d) for d in range(k + 1)]
                suite.check(characters == walk, f"character {lam} k={k}")
                if n <= brute_n and k <= brute_k:
                    suite.check(brute_force_counts(sigma, k) == walk, f"brute {lam} k={k}")
    for n in range(1, closed_n + 1):
        lam = CycleType((n,))
        for k in range(closed_k + 1):
            for d in path_count_table(lam, k).window(k):
                suite.check(s_ncycle_closed(n, k, d) == count_S(lam, k, d), f"closed [{n}] k={k} d={d}")
    return suite.result()


def closed_form_tables(quick: bool = False) -> SuiteResult:
    suite = _Suite("closed-form-tables")
    for n in range(1, 9):
        suite.check(c_np(n, n - 1) * n * n == n**n, f"c_{n},{n - 1}")
    for n in range(1, 7):
        suite.check(24 * c_np(n, n + 1) == (n * n - 1) * n ** (n + 1), f"c_{n},{n + 1}")
        suite.check(
            5760 * c_np(n, n + 3) == (5 * n - 7) * (n + 3) * (n + 2) * (n * n - 1) * n ** (n + 3),
            f"c_{n},{n + 3}",
        )
    order = 8 if quick else 12
    for n in range(1, 6 if quick else 8):
        coefficients = cnp_egf_coefficients(n, order)
        suite.check(coefficients == [c_np(n, p) for p in range(order + 1)], f"EGF n={n}")
    for n in range(1, 10):
        lam = CycleType((n,))
        for k in range(n + 2):
            suite.check(s_cycle_zero_defect(n, k) == count_S(lam, k, 0), f"S([{n}],{k},0)")
    for n in range(1, 6):
        for t_value, N_value in ((0.3, 2), (1.0, 3)):
            closed = float(cycle_generating_function(n, t_value, N_value))
            series = float(cycle_generating_series(n, t_value, N_value))
            suite.check(
                math.isclose(closed, series, rel_tol=1e-9),
                f"generating function n={n} t={t_value} N={N_value}",
            )
    return suite.result()


def structural_identities(quick: bool = False) -> SuiteResult:
    suite = _Suite("structural-identities")
    for n in range(1, 8):
        matrix = transition_counts(n)
        suite.check(all(sum(row) == comb(n, 2) for row in matrix.counts), f"row sums n={n}")
    for n in range(1, 7):
        for lam in partitions(n):
            table = path_count_table(lam, 6)
            for k in range(7):
                suite.check(sum(table.table[k]) == comb(n, 2) ** k, f"Σ_d S {lam} k={k}")
    for n in range(1, 4 if quick else 6):
        for t_value, N_value in ((1, 1), (0.5, 3)):
            plus = transfer_matrix(n, 1, t_value, N_value)
            minus = transfer_matrix(n, -1, t_value, N_value)
            product = plus.dot(minus)
            deviation = max(
                abs(product[i, j] - (1 if i == j else 0))
                for i in range(product.shape[0])
                for j in range(product.shape[1])
            )
            suite.worst("transfer_inverse", float(deviation))
            suite.check(deviation < 1e-12, f"M⁺M⁻ = Id n={n} t={t_value} N={N_value}")
    for n in range(1, 7):
        suite.check(jm_identity_check(n), f"Jucys-Murphy n={n}")
    matrix = transition_counts(4)
    observed = {
        (lam.parts, mu.parts): matrix.count(lam, mu)
        for lam in matrix.index
        for mu in matrix.index
        if matrix.count(lam, mu)
    }
    suite.check(observed == S4_EDGES, "class graph of S_4")
    return suite.result()


def casimir_identities(quick: bool = False) -> SuiteResult:
    suite = _Suite("casimir-identities")
    cases = [(Group.U, n, N) for n, N in ((1, 2), (2, 2), (2, 3), (3, 2), (3, 3))]
    cases += [(Group.SO, n, N) for n, N in ((2, 3), (2, 4), (3, 3))]
    cases += [(Group.SP, n, N) for N in (1, 2) for n in (1, 2, 3)]
    for group, n, N in cases:
        report = casimir_identity_check(group, n, N)
        suite.worst("max_deviation", report.max_deviation)
        suite.check(report.holds, f"{group.value} n={n} N={N}")
    for n, N in ((1, 2), (2, 2), (2, 3), (3, 2)):
        suite.check(su_shift_check(n, N), f"SU shift n={n} N={N}")
    return suite.result()


def fourier_oracle(quick: bool = False) -> SuiteResult:
    suite = _Suite("fourier-oracle")
    for n in range(1, 4 if quick else 6):
        for lam in partitions(n):
            for N in range(1, 5):
                for t_value in (0.25, 1.0):
                    gap = abs(fourier_moment(lam, N, t_value) - moment_value(lam, N, t_value).value)
                    suite.worst("max_gap", gap)
                    suite.check(gap < 1e-10, f"{lam} N={N} t={t_value}")
    return suite.result()


def factorization(quick: bool = False) -> SuiteResult:
    suite = _Suite("factorization")
    for n in range(2, 5 if quick else 7):
        for lam in partitions(n):
            if lam.length >= 2:
                suite.check(factorization_defect(lam).is_zero, f"factorization {lam}")
    for n in range(1, 5):
        for lam in partitions(n):
            suite.check(variance_expansion(lam, 0).slice(0).is_zero, f"variance {lam}")
    return suite.result()


def _two_letter_words(length: int) -> list[str]:
    words = []
    for mask in range(1, 2**length - 1):
        letters = ["a" if mask >> i & 1 else "b" for i in range(length)]
        words.append(" ".join(f"{a}({0.5 if a == 'a' else 1.0})" for a in letters))
    return words


def free_probability(quick: bool = False) -> SuiteResult:
    suite = _Suite("free-probability")
    for n in range(1, 9 if quick else 13):
        for t_value in (0.25, 1.0):
            gap = abs(limit_moment(n, t_value) - moment_from_cumulants(n, t_value))
            suite.worst("moment_cumulant_gap", gap)
            suite.check(gap < 1e-12, f"moment-cumulant n={n} t={t_value}")
    for length in range(2, 5 if quick else 7):
        for text in _two_letter_words(length):
            cumulant = word_cumulant(Word.parse(text))
            suite.worst("mixed_cumulant", abs(cumulant))
            suite.check(abs(cumulant) < 1e-10, f"mixed cumulant {text}")
    for t_value in (0.0, 1.0, 4.0):
        for angle in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            z = 0.05 * complex(math.cos(angle), math.sin(angle))
            residual = abs(chi_residual(t_value, z))
            suite.worst("chi_residual", residual)
            suite.check(residual < 1e-8, f"chi t={t_value} z={z:.3f}")
    for n in range(1, 10):
        suite.check(limit_moment_poly(n) == expansion.leading_slice(CycleType((n,))), f"limit slice n={n}")
    return suite.result()


def monte_carlo(quick: bool = False, *, pool: SampleWorkerPool | None = None) -> SuiteResult:
    suite = _Suite("monte-carlo")
    samples, steps = (2_000, 50) if quick else (100_000, 1_000)
    for parts in ((1,), (2,), (3,)):
        cfg = SimConfig(N=8, t=1.0, steps=steps, samples=samples, seed=1)
        check = moment_check(CycleType(parts), cfg, pool=pool)
        suite.worst("moment_sigmas", abs(check.sigmas_away))
        suite.check(check.within(3), f"moment {parts}: {check.sigmas_away:.2f}σ")
        if not quick:
            suite.check(check.stderr < 0.01 * abs(check.exact), f"relative stderr {parts}")
    for text in ("id", "(1 2)"):
        sigma = Permutation.parse(text, n=2)
        check = martingale_check(sigma, 2, 0.3, samples, seed=2, steps=max(steps // 10, 20), pool=pool)
        suite.worst("martingale_sigmas", abs(check.sigmas_away))
        suite.check(check.within(3), f"martingale {text}: {check.sigmas_away:.2f}σ")
    cfg = SimConfig(N=4, t=1.0, steps=max(steps // 10, 20), samples=samples, seed=3)
    conjugated = conjugation_check(CycleType((2,)), cfg, pool=pool)
    suite.check(conjugated.within(3), f"conjugation: {conjugated.sigmas_away:.2f}σ")
    slope_cfg = SimConfig(N=4, t=1.0, steps=max(steps // 10, 20), samples=samples // 2, seed=4)
    slope = variance_slope(CycleType((1,)), [4, 8, 16], 1.0, slope_cfg, pool=pool)
    suite.details["variance_slope"] = slope
    suite.check(abs(slope + 2) <= 0.4, f"variance slope {slope:.3f}")
    return suite.result()


def genus_expansion(quick: bool = False, *, pool: SampleWorkerPool | None = None) -> SuiteResult:
    suite = _Suite("genus-expansion")
    for n in range(1, 4 if quick else 5):
        for lam in partitions(n):
            for N in (1, 2, 3):
                for t_value in (0.25, 1.0):
                    gap = abs(analytic_expectation(n, lam, N, t_value) - genus_target(lam, N, t_value))
                    suite.worst("analytic_gap", gap)
                    suite.check(gap < 1e-10, f"analytic {lam} N={N} t={t_value}")
    samples = 20_000 if quick else 1_000_000
    check = genus_estimator(3, CycleType((3,)), 2, 0.5, samples, seed=5, pool=pool)
    suite.worst("estimator_sigmas", abs(check.sigmas_away))
    suite.check(check.within(3), f"genus estimator: {check.sigmas_away:.2f}σ")
    return suite.result()


def noncrossing(quick: bool = False) -> SuiteResult:
    suite = _Suite("noncrossing")
    source, expected = (NCPartition.parse(text) for text in KREWERAS_EXAMPLE)
    suite.check(kreweras(source) == expected, "Kreweras example by permutations")
    suite.check(kreweras_by_interleaving(source) == expected, "Kreweras example by interleaving")
    for n in range(0, 9 if quick else 13):
        suite.check(len(enumerate_nc(n)) == catalan(n), f"|NC({n})|")
    for n in range(1, 11):
        total = 0
        for lam in partitions(n):
            s = [0] * n
            for part in lam.parts:
                s[part - 1] += 1
            total += count_by_type(n, s)
        suite.check(total == catalan(n), f"Σ count_by_type n={n}")
    for n in range(1, 9):
        by_rank: dict[int, int] = {}
        for partition in enumerate_nc(n):
            by_rank[partition.rank] = by_rank.get(partition.rank, 0) + count_increasing_paths(partition)
        for k in range(n):
            suite.check(by_rank.get(k, 0) == s_cycle_zero_defect(n, k), f"paths rank {k} n={n}")
    return suite.result()


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "worked-examples": worked_examples,
    "triple-oracle": triple_oracle,
    "closed-form-tables": closed_form_tables,
    "structural-identities": structural_identities,
    "casimir-identities": casimir_identities,
    "fourier-oracle": fourier_oracle,
    "factorization": factorization,
    "free-probability": free_probability,
    "monte-carlo": monte_carlo,
    "genus-expansion": genus_expansion,
    "noncrossing": noncrossing,
}


def run_all(quick: bool = False, names: list[str] | None = None) -> list[SuiteResult]:
    results = []
    for name in names or list(SUITES):
        LOGGER.info("Running suite %s (quick=%s)", name, quick)
        try:
            results.append(SUITES[name](quick))
        except HeatwalkError as exc:
            LOGGER.warning("Suite %s aborted: %s", name, exc)
            results.append(SuiteResult(name=name, passed=False, failures=[f"aborted: {exc}"]))
    return results
