"""Exponential-polynomial expansions of E[∏ Tr_N(B^{m_i}_{t/N})].

An :class:`ExpPoly` stores the raw path counts ``S(σ,k,d)``; the sign
``(-1)^k``, the factorial and the ``N^{-2d}`` weight are applied on evaluation::

    value = prefactor · Σ_{d ≤ d_max} Σ_k (-1)^k t^k S(σ,k,d) / (k! N^{2d})

with prefactor ``e^{-nt/2}`` for U(N) and ``e^{-nt/2 + n²t/(2N²)}`` for SU(N).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, factorial, prod
from typing import Mapping

import mpmath
import sympy as sp

from .class_walk import poisson_tail, count_S, path_count_table
from .config import settings
from .errors import PrecisionError, check_budget
from .models import Group
from .perm_core import CycleType, partitions
from .sym_char import casimir_eigenvalue, mn_character, omega_character

LOGGER = logging.getLogger(__name__)

t = sp.Symbol("t")

_D_MAX_CAP = 400


@dataclass(frozen=True)
class ExpPoly:
    n: int
    ell: int
    group: Group
    d_max: int
    coeffs: Mapping[tuple[int, int], int]
    rate: int
    multiplicity: int = 1
    label: str = ""

    @property
    def su_correction(self) -> bool:
        return self.group == Group.SU

    def k_window(self, d: int) -> range:
        low = max(d, 2 * d - (self.ell - 1))
        return range(low, 2 * d + self.n - self.ell + 1)

    def slice(self, d: int) -> sp.Poly:
        """Σ_k (-1)^k S(σ,k,d) t^k/k! as an exact polynomial in t."""
        data = {
            (k,): sp.Rational((-1) ** k * value, factorial(k))
            for (dd, k), value in self.coeffs.items()
            if dd == d and value
        }
        if not data:
            return sp.Poly(0, t, domain=sp.QQ)
        return sp.Poly.from_dict(data, t, domain=sp.QQ)

    def rows(self) -> list[tuple[int, int, int]]:
        return [(d, k, self.coeffs[(d, k)]) for d, k in sorted(self.coeffs)]

    def tail_bound(self, N: mpmath.mpf, t_value: mpmath.mpf) -> mpmath.mpf:
        """Bound on the discarded slices d > d_max (requires N ≥ 1)."""
        next_d = self.d_max + 1
        k0 = max(next_d, 2 * next_d - (self.ell - 1))
        tail = poisson_tail(self.rate * t_value, k0)
        return self.multiplicity * self.prefactor(N, t_value) * N ** (-2 * next_d) * tail

    def prefactor(self, N: mpmath.mpf, t_value: mpmath.mpf) -> mpmath.mpf:
        exponent = -self.n * t_value / 2
        if self.su_correction:
            exponent += self.n**2 * t_value / (2 * N**2)
        return mpmath.exp(exponent)


@dataclass(frozen=True)
class Evaluation:
    value: float
    error_bound: float
    d_max: int
    extrapolated: bool = False


def _window(lam: CycleType, d: int) -> range:
    return range(max(d, 2 * d - (lam.length - 1)), 2 * d + lam.norm + 1)


def moment_expansion(lam: CycleType, group: Group = Group.U, d_max: int = 4) -> ExpPoly:
    if group not in (Group.U, Group.SU):
        raise ValueError(f"no heat-kernel expansion for {group.value}")
    if d_max < 0:
        raise ValueError("d_max must be nonnegative")
    table = path_count_table(lam, 2 * d_max + lam.norm)
    coeffs = {}
    for d in range(d_max + 1):
        for k in _window(lam, d):
            value = table.S(k, d)
            if value:
                coeffs[(d, k)] = value
    return ExpPoly(
        n=lam.n,
        ell=lam.length,
        group=group,
        d_max=d_max,
        coeffs=coeffs,
        rate=comb(lam.n, 2),
        label=f"{group.value}{lam}",
    )


def _as_mpf(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def evaluate(p: ExpPoly, N: float, t_value: float, precision: int = 15) -> Evaluation:
    if N < 1:
        raise ValueError("evaluation needs N >= 1")
    if t_value < 0:
        raise ValueError("t must be nonnegative")
    extrapolated = float(N) != int(N)
    if extrapolated:
        LOGGER.warning("Evaluating %s at non-integer N=%s (extrapolation)", p.label, N)
    with mpmath.workdps(precision + 15):
        N_mp, t_mp = _as_mpf(N), _as_mpf(t_value)
        series = mpmath.mpf(0)
        for (d, k), value in sorted(p.coeffs.items()):
            series += (-1) ** k * t_mp**k * value / (mpmath.factorial(k) * N_mp ** (2 * d))
        value = p.prefactor(N_mp, t_mp) * series
        bound = p.tail_bound(N_mp, t_mp)
        if bound > mpmath.mpf(10) ** (-precision):
            raise PrecisionError(
                f"tail bound {mpmath.nstr(bound, 3)} at d_max={p.d_max} misses 1e-{precision}"
            )
        return Evaluation(
            value=float(value), error_bound=float(bound), d_max=p.d_max, extrapolated=extrapolated
        )


def required_d_max(
    n: int,
    ell: int,
    N: float,
    t_value: float,
    precision: int = 15,
    *,
    group: Group = Group.U,
    rate: int | None = None,
    multiplicity: int = 1,
) -> int:
    """Smallest d_max whose certified tail bound is below ``10**-precision``."""
    probe = ExpPoly(
        n=n,
        ell=ell,
        group=group,
        d_max=0,
        coeffs={},
        rate=comb(n, 2) if rate is None else rate,
        multiplicity=multiplicity,
    )
    with mpmath.workdps(precision + 15):
        N_mp, t_mp = _as_mpf(N), _as_mpf(t_value)
        tolerance = mpmath.mpf(10) ** (-precision)
        for d_max in range(_D_MAX_CAP):
            probe = replace(probe, d_max=d_max)
            if probe.tail_bound(N_mp, t_mp) <= tolerance:
                return d_max
    raise PrecisionError(f"no d_max below {_D_MAX_CAP} reaches 1e-{precision}")


def moment_value(
    lam: CycleType, N: float, t_value: float, group: Group = Group.U, precision: int = 15
) -> Evaluation:
    """E[p_σ(B_{t/N})] with the truncation chosen to meet ``precision``."""
    d_max = required_d_max(lam.n, lam.length, N, t_value, precision, group=group)
    return evaluate(moment_expansion(lam, group, d_max), N, t_value, precision)


def fourier_moment(lam: CycleType, N: int, t_value: float, group: Group = Group.U) -> float:
    """Normalized moment from the finite sum over irreducibles μ ⊢ n with ℓ(μ) ≤ N."""
    if int(N) != N or N < 1:
        raise ValueError("fourier_moment needs a positive integer N")
    N = int(N)
    n = lam.n
    with mpmath.workdps(40):
        total = mpmath.mpf(0)
        for mu in partitions(n):
            if mu.length > N:
                continue
            chi = mn_character(mu, lam)
            if not chi:
                continue
            dimension = _as_mpf(omega_character(mu)(N)) / factorial(n)
            c2 = _as_mpf(casimir_eigenvalue(mu)(N))
            total += mpmath.exp(-c2 * t_value / (2 * N)) * dimension * chi
        if group == Group.SU:
            total *= mpmath.exp(mpmath.mpf(n**2) * t_value / (2 * N**2))
        return float(total / mpmath.mpf(N) ** lam.length)


def shuffle_factorize(lam: CycleType, k: int) -> int:
    """S(σ,k,0) as the multinomial shuffle of per-cycle defect-free counts."""
    product = [Fraction(1)] + [Fraction(0)] * k
    for m in lam.parts:
        cycle = CycleType((m,))
        factor = [Fraction(count_S(cycle, l, 0), factorial(l)) for l in range(k + 1)]
        product = [
            sum(product[i] * factor[j - i] for i in range(j + 1)) for j in range(k + 1)
        ]
    value = product[k] * factorial(k)
    return int(value)


def covariance_expansion(lam: CycleType, other: CycleType, d_max: int) -> ExpPoly:
    """(d,k)-table of E[p_{σ×σ′}] - E[p_σ]E[p_σ′] in the raw-S convention."""
    joint = lam.concat(other)
    check_budget("joint degree", joint.n, settings.n_max * 2)
    coeffs = dict(moment_expansion(joint, Group.U, d_max).coeffs)
    left = moment_expansion(lam, Group.U, d_max).coeffs
    right = moment_expansion(other, Group.U, d_max).coeffs
    for (d1, l1), a in left.items():
        for (d2, l2), b in right.items():
            if d1 + d2 > d_max:
                continue
            key = (d1 + d2, l1 + l2)
            coeffs[key] = coeffs.get(key, 0) - comb(l1 + l2, l1) * a * b
    return ExpPoly(
        n=joint.n,
        ell=joint.length,
        group=Group.U,
        d_max=d_max,
        coeffs={key: value for key, value in coeffs.items() if value},
        rate=comb(joint.n, 2),
        multiplicity=2,
        label=f"Cov{lam}{other}",
    )


def variance_expansion(lam: CycleType, d_max: int, *, n_max: int | None = None) -> ExpPoly:
    check_budget("doubled degree", 2 * lam.n, n_max or settings.n_max)
    return covariance_expansion(lam, lam, d_max)


def leading_slice(lam: CycleType) -> sp.Poly:
    return moment_expansion(lam, Group.U, 0).slice(0)


def factorization_defect(lam: CycleType) -> sp.Poly:
    """d=0 slice of λ minus the product of the per-cycle d=0 slices."""
    factors = [leading_slice(CycleType((m,))) for m in lam.parts]
    return leading_slice(lam) - prod(factors[1:], start=factors[0])
