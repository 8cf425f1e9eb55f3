"""Characters of S_n and the character-theoretic formulas for path counts.

Symbolic N is handled by :class:`LaurentPolyN`, a sympy polynomial over QQ
multiplied by a power of N.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Mapping

import mpmath
import sympy as sp

from .class_walk import path_count_table
from .config import settings
from .errors import DegreeMismatchError, IdentityViolation, check_budget
from .perm_core import CycleType, all_permutations, partitions

LOGGER = logging.getLogger(__name__)

N = sp.Symbol("N")


@dataclass(frozen=True)
class Partition(CycleType):
    """An irreducible representation of S_n, indexed by its Young diagram."""

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def contents(self) -> list[int]:
        return [j - i for i, row in enumerate(self.parts) for j in range(row)]

    def hook_lengths(self) -> list[int]:
        columns = self.conjugate().parts
        return [
            row - j + columns[j] - i - 1 for i, row in enumerate(self.parts) for j in range(row)
        ]

    @property
    def dimension(self) -> int:
        return hook_dimension(self)


def as_partition(shape: CycleType) -> Partition:
    return shape if isinstance(shape, Partition) else Partition(shape.parts)


def hook_dimension(lam: CycleType) -> int:
    return factorial(lam.n) // prod(as_partition(lam).hook_lengths())


def _monomial(exponent: int) -> sp.Poly:
    return sp.Poly.from_dict({(exponent,): 1}, N, domain=sp.QQ)


def _to_fraction(value) -> Fraction:
    rational = sp.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


@dataclass(frozen=True)
class LaurentPolyN:
    """``N**shift * poly`` with ``poly`` a polynomial in N over the rationals.

    The constructor factors out every power of N from ``poly`` so that equal
    Laurent polynomials have equal fields.
    """

    poly: sp.Poly
    shift: int = 0

    def __post_init__(self) -> None:
        poly = self.poly if isinstance(self.poly, sp.Poly) else sp.Poly(self.poly, N, domain=sp.QQ)
        if poly.is_zero:
            object.__setattr__(self, "poly", sp.Poly(0, N, domain=sp.QQ))
            object.__setattr__(self, "shift", 0)
            return
        lowest = min(monom[0] for monom in poly.monoms())
        if lowest:
            poly = sp.Poly.from_dict(
                {(monom[0] - lowest,): c for monom, c in poly.terms()}, N, domain=sp.QQ
            )
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "shift", int(self.shift) + lowest)

    @classmethod
    def from_coefficients(cls, coefficients: Mapping[int, Fraction | int]) -> "LaurentPolyN":
        support = {e: c for e, c in coefficients.items() if c}
        if not support:
            return cls(sp.Poly(0, N, domain=sp.QQ))
        lowest = min(support)
        data = {(e - lowest,): sp.Rational(Fraction(c).numerator, Fraction(c).denominator) for e, c in support.items()}
        return cls(sp.Poly.from_dict(data, N, domain=sp.QQ), lowest)

    @classmethod
    def constant(cls, value: Fraction | int) -> "LaurentPolyN":
        return cls.from_coefficients({0: value})

    def coefficients(self) -> dict[int, Fraction]:
        if self.poly.is_zero:
            return {}
        return {monom[0] + self.shift: _to_fraction(c) for monom, c in self.poly.terms()}

    def coefficient(self, exponent: int) -> Fraction:
        return self.coefficients().get(exponent, Fraction(0))

    def _aligned(self, other: "LaurentPolyN") -> tuple[sp.Poly, sp.Poly, int]:
        low = min(self.shift, other.shift)
        return (
            self.poly * _monomial(self.shift - low),
            other.poly * _monomial(other.shift - low),
            low,
        )

    def __add__(self, other: "LaurentPolyN | Fraction | int") -> "LaurentPolyN":
        if not isinstance(other, LaurentPolyN):
            other = LaurentPolyN.constant(other)
        left, right, low = self._aligned(other)
        return LaurentPolyN(left + right, low)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolyN":
        return LaurentPolyN(-self.poly, self.shift)

    def __sub__(self, other: "LaurentPolyN | Fraction | int") -> "LaurentPolyN":
        if not isinstance(other, LaurentPolyN):
            other = LaurentPolyN.constant(other)
        return self + (-other)

    def __mul__(self, other: "LaurentPolyN | Fraction | int") -> "LaurentPolyN":
        if isinstance(other, LaurentPolyN):
            return LaurentPolyN(self.poly * other.poly, self.shift + other.shift)
        factor = Fraction(other)
        return LaurentPolyN(
            self.poly * sp.Rational(factor.numerator, factor.denominator), self.shift
        )

    __rmul__ = __mul__

    def shifted(self, exponent: int) -> "LaurentPolyN":
        return LaurentPolyN(self.poly, self.shift + exponent)

    def __call__(self, value):
        """Evaluate at N = value; exact for ints and Fractions."""
        if isinstance(value, (int, Fraction)):
            point = Fraction(value)
            return sum((c * point**e for e, c in self.coefficients().items()), Fraction(0))
        return sum(float(c) * float(value) ** e for e, c in self.coefficients().items())

    def as_expr(self) -> sp.Expr:
        return self.poly.as_expr() * N**self.shift

    def __str__(self) -> str:
        return str(sp.expand(self.as_expr()))


@lru_cache(maxsize=None)
def _mn(shape: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not shape else 0
    m, rest = cycles[0], cycles[1:]
    r = len(shape)
    beta = [part + (r - 1 - i) for i, part in enumerate(shape)]
    beads = set(beta)
    total = 0
    for i, b in enumerate(beta):
        target = b - m
        if target < 0 or target in beads:
            continue
        height = sum(1 for x in beta if target < x < b)
        moved = sorted(beta[:i] + [target] + beta[i + 1 :], reverse=True)
        smaller = tuple(p for p in (x - (r - 1 - j) for j, x in enumerate(moved)) if p > 0)
        total += (-1) ** height * _mn(smaller, rest)
    return total


def mn_character(lam: CycleType, mu: CycleType) -> int:
    """χ^λ on the class μ by the Murnaghan–Nakayama rule (rim hooks via beta-numbers)."""
    if lam.n != mu.n:
        raise DegreeMismatchError(f"|λ|={lam.n} but |μ|={mu.n}")
    return _mn(lam.parts, mu.parts)


@dataclass(frozen=True)
class CharTable:
    n: int
    irreps: tuple[Partition, ...]
    classes: tuple[CycleType, ...]
    class_sizes: tuple[int, ...]
    values: tuple[tuple[int, ...], ...]

    def value(self, lam: CycleType, mu: CycleType) -> int:
        return self.values[self.irreps.index(as_partition(lam))][self.classes.index(CycleType(mu.parts))]


def character_table(n: int) -> CharTable:
    classes = partitions(n)
    irreps = tuple(Partition(c.parts) for c in classes)
    values = tuple(tuple(mn_character(lam, mu) for mu in classes) for lam in irreps)
    return CharTable(
        n=n,
        irreps=irreps,
        classes=classes,
        class_sizes=tuple(mu.class_size() for mu in classes),
        values=values,
    )


def _elementary(values: list[int], r: int) -> int:
    coefficients = [1]
    for v in values:
        coefficients = [a + v * b for a, b in zip(coefficients + [0], [0] + coefficients)]
    return coefficients[r] if 0 <= r < len(coefficients) else 0


def content_sym(lam: CycleType, r: int) -> int:
    """e_r of the contents of λ, i.e. χ^λ(Σ_r)/χ^λ(1)."""
    if not 0 <= r <= lam.n - 1:
        raise ValueError(f"r={r} outside 0..{lam.n - 1}")
    return _elementary(as_partition(lam).contents(), r)


def content_total(lam: CycleType) -> int:
    return sum(as_partition(lam).contents())


def omega_character(mu: CycleType) -> LaurentPolyN:
    """χ^μ(Ω) = dim μ · ∏ (N + c) over the contents c of μ."""
    poly = sp.Poly(hook_dimension(mu), N, domain=sp.QQ)
    for c in as_partition(mu).contents():
        poly = poly * sp.Poly(N + c, N, domain=sp.QQ)
    return LaurentPolyN(poly)


def casimir_eigenvalue(mu: CycleType) -> LaurentPolyN:
    """c₂(μ) = nN + n(n-1)χ^μ((12))/χ^μ(1)."""
    n = mu.n
    linear = LaurentPolyN.from_coefficients({1: n})
    if n < 2:
        return linear
    transposition = CycleType((2,) + (1,) * (n - 2))
    ratio = Fraction(mn_character(mu, transposition), hook_dimension(mu))
    return linear + n * (n - 1) * ratio


def class_path_count(pi: CycleType, k: int) -> int:
    """#Π_k(id → π) for any π of class ``pi``: Σ_μ dim μ χ^μ(π) c(μ)^k / n!."""
    total = Fraction(0)
    for mu in partitions(pi.n):
        chi = mn_character(mu, pi)
        if chi:
            total += hook_dimension(mu) * chi * Fraction(content_total(mu)) ** k
    total /= factorial(pi.n)
    if total.denominator != 1:  # pragma: no cover - guard
        raise IdentityViolation("path count integrality", (pi, k), total, "integer")
    return int(total)


def char_sum_S(lam: CycleType, k: int) -> LaurentPolyN:
    """Σ_d S(σ,k,d) N^{-2d} from the character sum over irreducibles of S_n."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = lam.n
    total = sp.Poly(0, N, domain=sp.QQ)
    for mu in partitions(n):
        chi = mn_character(mu, lam)
        if not chi:
            continue
        weight = sp.Rational(chi * content_total(mu) ** k, factorial(n))
        omega = omega_character(mu)
        total = total + omega.poly * _monomial(omega.shift) * weight
    result = LaurentPolyN(total, -lam.length - k)
    for exponent, c in result.coefficients().items():
        if exponent > 0 or exponent % 2 or c < 0 or c.denominator != 1:
            raise IdentityViolation("char_sum_S shape", (lam, k, exponent), c, "nonnegative integer at N^{-2d}")
    return result


def char_sum_coefficient(lam: CycleType, k: int, d: int) -> int:
    return int(char_sum_S(lam, k).coefficient(-2 * d))


def schur_at_identity(lam: CycleType, value: int) -> Fraction:
    """Σ_μ χ^μ(σ) s_μ(I_N) at N = value; equals N^{ℓ(σ)}."""
    total = Fraction(0)
    for mu in partitions(lam.n):
        chi = mn_character(mu, lam)
        if chi:
            total += chi * omega_character(mu)(value)
    return total / factorial(lam.n)


@lru_cache(maxsize=None)
def stirling_first_unsigned(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    return (n - 1) * stirling_first_unsigned(n - 1, k) + stirling_first_unsigned(n - 1, k - 1)


def stirling_first_signed(n: int, k: int) -> int:
    return (-1) ** ((n - k) % 2) * stirling_first_unsigned(n, k)


def s_ncycle_closed(n: int, k: int, d: int) -> int:
    """S((1…n), k, d) as a signed Stirling-number sum over the hook characters."""
    if n < 1 or k < 0 or d < 0:
        return 0
    j = n - 1 - k + 2 * d
    total = Fraction(0)
    for r in range(n):
        s = n - 1 - r
        power = (Fraction(n * (s - r), 2)) ** k
        inner = 0
        for l in range(j + 1):
            m = j - l
            inner += (-1) ** l * stirling_first_signed(s + 1, s + 1 - l) * stirling_first_signed(r + 1, r + 1 - m)
        total += Fraction((-1) ** r, factorial(r) * factorial(s)) * power * inner
    total /= n
    if total.denominator != 1 or total < 0:
        raise IdentityViolation("s_ncycle_closed integrality", (n, k, d), total, "nonnegative integer")
    return int(total)


def c_np(n: int, p: int) -> int:
    """S((1…n), p, d) with p = n-1+2d; zero for every other p."""
    if n < 1 or p < n - 1 or (p - n + 1) % 2:
        return 0
    half = Fraction(n - 1, 2)
    total = sum(
        ((-1) ** r * comb(n - 1, r) * (half - r) ** p for r in range(n)), Fraction(0)
    )
    value = total * Fraction(n**p, factorial(n))
    if value.denominator != 1:  # pragma: no cover - guard
        raise IdentityViolation("c_np integrality", (n, p), value, "integer")
    return int(value)


def cnp_egf_coefficients(n: int, order: int) -> list[int]:
    """p! [x^p] of e^{n(n-1)x/2}(1-e^{-nx})^{n-1}/n! for p ≤ order."""
    x = sp.Symbol("x")
    expr = sp.exp(sp.Rational(n * (n - 1), 2) * x) * (1 - sp.exp(-n * x)) ** (n - 1) / sp.factorial(n)
    series = sp.series(expr, x, 0, order + 1).removeO()
    poly = sp.Poly(sp.expand(series), x)
    result = []
    for p in range(order + 1):
        value = poly.coeff_monomial(x**p) * sp.factorial(p)
        result.append(int(sp.Rational(value)))
    return result


def cycle_generating_function(n: int, t: float, N_value: float) -> mpmath.mpf:
    """Closed form of Σ_{k,d} (-1)^k t^k S((1…n),k,d) / (d! N^{2d})."""
    t, N_value = mpmath.mpf(t), mpmath.mpf(N_value)
    total = mpmath.mpf(0)
    for r in range(n):
        s = n - 1 - r
        c = mpmath.mpf(n * (s - r)) / 2
        upper = mpmath.fprod(i - t * c for i in range(1, s + 1))
        lower = mpmath.fprod(-t * c - i for i in range(1, r + 1))
        total += (-1) ** r / mpmath.mpf(factorial(r) * factorial(s)) * mpmath.exp((c * t / N_value) ** 2) * upper * lower
    return total / n


def cycle_generating_series(n: int, t: float, N_value: float, d_max: int = 40) -> mpmath.mpf:
    """The same sum read off the path tables, truncated at d ≤ d_max."""
    if n < 1:
        raise ValueError("n must be at least 1")
    table = path_count_table(CycleType((n,)), 2 * d_max + n - 1)
    with mpmath.workdps(30):
        t, N_value = mpmath.mpf(t), mpmath.mpf(N_value)
        terms = [
            (-t) ** k * table.S(k, d) / (mpmath.factorial(d) * N_value ** (2 * d))
            for k in range(table.k_max + 1)
            for d in table.window(k)
            if d <= d_max
        ]
        return mpmath.fsum(terms)


def jm_identity_check(n: int, *, n_max: int | None = None) -> bool:
    """Check ∏_{i≤n}(z + X_i) = Σ_σ z^{ℓ(σ)} σ in the group algebra of S_n."""
    check_budget("Jucys-Murphy degree", n, n_max or settings.jm_n_max)
    identity = tuple(range(1, n + 1))
    element: Counter[tuple[tuple[int, ...], int]] = Counter({(identity, 0): 1})
    for i in range(1, n + 1):
        product: Counter[tuple[tuple[int, ...], int]] = Counter()
        for (images, power), c in element.items():
            product[(images, power + 1)] += c
            for j in range(1, i):
                moved = list(images)
                moved[j - 1], moved[i - 1] = moved[i - 1], moved[j - 1]
                product[(tuple(moved), power)] += c
        element = product
    expected = Counter({(sigma.images, sigma.cycle_count): 1 for sigma in all_permutations(n)})
    observed = Counter({key: c for key, c in element.items() if c})
    if observed != expected:
        LOGGER.warning("Jucys-Murphy identity failed for n=%s", n)
        return False
    return True

