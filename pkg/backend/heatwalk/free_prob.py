"""Large-N limits: the free unitary Brownian motion u_t and words in free copies of it."""

from __future__ import annotations

import cmath
import logging
import math
import re
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Mapping

import mpmath
import sympy as sp

from .class_walk import count_geodesics, count_paths_between
from .config import settings
from .errors import PrecisionError, check_budget
from .noncross import count_by_type, enumerate_nc
from .perm_core import CycleType, Permutation, compose, partitions

LOGGER = logging.getLogger(__name__)

t = sp.Symbol("t")

_LETTER_RE = re.compile(r"([A-Za-z_]\w*)\(\s*([^()]*?)\s*\)")


@dataclass(frozen=True)
class Word:
    """A product of independent Brownian motions, each letter run for its own time."""

    letters: tuple[str, ...]
    times: Mapping[str, float]

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("a word needs at least one letter")
        missing = set(self.letters) - set(self.times)
        if missing:
            raise ValueError(f"no time given for {sorted(missing)}")
        if any(value < 0 for value in self.times.values()):
            raise ValueError("times must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"a(0.5) b(1.0) a(0.5)"``; a variable must keep one time."""
        stripped = _LETTER_RE.sub("", text).strip()
        if "^" in stripped:
            raise ValueError(f"powers and inverse letters are not supported: {text!r}")
        if stripped:
            raise ValueError(f"malformed word {text!r} near {stripped!r}")
        letters: list[str] = []
        times: dict[str, float] = {}
        for name, value in _LETTER_RE.findall(text):
            time = float(value)
            if times.setdefault(name, time) != time:
                raise ValueError(f"variable {name!r} given two times")
            letters.append(name)
        return cls(tuple(letters), times)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(f"{a}({self.times[a]:g})" for a in self.letters)


def _limit_terms(n: int, t_value: float) -> list[float]:
    return [comb(n, k + 1) * (-n * t_value) ** k / (n * factorial(k)) for k in range(n)]


def limit_moment(n: int, t_value: float) -> float:
    """φ(u_t^n) = e^{-nt/2} Σ_{k<n} binom(n, k+1) (-nt)^k / (n k!)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if t_value < 0:
        raise ValueError("t must be nonnegative")
    terms = _limit_terms(n, t_value)
    total = math.fsum(terms)
    largest = max(abs(x) for x in terms)
    if largest > settings.cancellation_ratio * abs(total):
        digits = 20 + int(math.log10(largest + 1))
        LOGGER.info("limit_moment n=%s t=%s: cancellation, switching to %s digits", n, t_value, digits)
        with mpmath.workdps(digits):
            s = mpmath.mpf(t_value)
            exact = mpmath.fsum(
                comb(n, k + 1) * (-n * s) ** k / (n * mpmath.factorial(k)) for k in range(n)
            )
            return float(mpmath.exp(-n * s / 2) * exact)
    return math.exp(-n * t_value / 2) * total


def limit_moment_poly(n: int) -> sp.Poly:
    """e^{nt/2} φ(u_t^n) as an exact polynomial in t."""
    data = {
        (k,): sp.Rational(comb(n, k + 1) * (-n) ** k, n * factorial(k)) for k in range(n)
    }
    return sp.Poly.from_dict(data, t, domain=sp.QQ)


def free_cumulant(arg: int | Permutation | CycleType, t_value: float) -> float:
    """k_m(u_t) = e^{-mt/2} (-mt)^{m-1} / (m (m-1)!), multiplied over cycles for σ."""
    if isinstance(arg, Permutation):
        return math.prod(free_cumulant(m, t_value) for m in arg.cycle_type().parts)
    if isinstance(arg, CycleType):
        return math.prod(free_cumulant(m, t_value) for m in arg.parts)
    m = int(arg)
    if m < 1:
        raise ValueError("cumulant order must be at least 1")
    return math.exp(-m * t_value / 2) * (-m * t_value) ** (m - 1) / (m * factorial(m - 1))


def free_cumulant_by_geodesics(sigma: Permutation, t_value: float) -> float:
    """k_σ(u_t) = e^{-nt/2} (-t)^{|σ|} #Π_{|σ|}(id → σ) / |σ|!."""
    k = sigma.norm
    paths = count_paths_between(Permutation.identity(sigma.n), sigma, k)
    return math.exp(-sigma.n * t_value / 2) * (-t_value) ** k * paths / factorial(k)


def moment_from_cumulants(n: int, t_value: float, *, n_max: int | None = None) -> float:
    """Σ over NC(n) of the products of free cumulants, grouped by block type."""
    check_budget("moment-cumulant degree", n, n_max or settings.nc_n_max)
    terms = []
    for lam in partitions(n):
        s = [0] * n
        for part in lam.parts:
            s[part - 1] += 1
        terms.append(count_by_type(n, s) * free_cumulant(lam, t_value))
    return math.fsum(terms)


@dataclass(frozen=True)
class LeadingTerm:
    """One σ′ ≼ σ with weight e^{-nt/2} (-t)^j #Π_j(σ → σ′) / j!, j = |σ′σ⁻¹|."""

    target: Permutation
    order: int
    paths: int
    degree: int

    def __call__(self, t_value: float) -> float:
        return (
            math.exp(-self.degree * t_value / 2)
            * (-t_value) ** self.order
            * self.paths
            / factorial(self.order)
        )


def _interval_below(sigma: Permutation) -> list[Permutation]:
    """All σ′ ≼ σ, as products over the cycles c of σ of elements of [id, c]."""
    choices: list[list[tuple[int, ...]]] = [[]]
    for cycle in sigma.cycles():
        options = []
        for partition in enumerate_nc(len(cycle), n_max=settings.word_length_max):
            options.append(tuple(tuple(cycle[p - 1] for p in block) for block in partition.blocks))
        choices = [chosen + list(option) for chosen in choices for option in options]
    return [Permutation.from_cycles(cycles, sigma.n) for cycles in choices]


def leading_order_map(sigma: Permutation) -> list[LeadingTerm]:
    terms = []
    for target in _interval_below(sigma):
        step = compose(sigma.inverse(), target)
        terms.append(
            LeadingTerm(target=target, order=step.norm, paths=count_geodesics(step), degree=sigma.n)
        )
    return terms


def _canonical_rotation(letters: tuple[str, ...]) -> tuple[str, ...]:
    return min(letters[i:] + letters[:i] for i in range(len(letters)))


class _WordEvaluator:
    """Per-call memo of limit moments and mixed cumulants over one set of times."""

    def __init__(self, times: Mapping[str, float]) -> None:
        self.times = times
        self._moments: dict[tuple[str, ...], float] = {(): 1.0}
        self._cumulants: dict[tuple[str, ...], float] = {}

    def moment(self, letters: tuple[str, ...]) -> float:
        key = _canonical_rotation(letters) if letters else ()
        if key not in self._moments:
            self._moments[key] = self._expand(key)
        return self._moments[key]

    def _expand(self, letters: tuple[str, ...]) -> float:
        counts = {a: letters.count(a) for a in letters}
        if len(counts) == 1:
            return limit_moment(len(letters), self.times[letters[0]])
        variable = min(counts, key=lambda a: (counts[a], letters.index(a)))
        # rotate so the word reads W₁ a W₂ a ... W_r a
        last = max(i for i, a in enumerate(letters) if a == variable)
        rotated = letters[last + 1 :] + letters[: last + 1]
        blocks: list[tuple[str, ...]] = []
        current: list[str] = []
        for letter in rotated:
            if letter == variable:
                blocks.append(tuple(current))
                current = []
            else:
                current.append(letter)
        r = len(blocks)
        total = []
        for term in leading_order_map(Permutation.long_cycle(r)):
            weight = term(self.times[variable])
            if weight == 0:
                continue
            factor = 1.0
            for cycle in term.target.cycles():
                factor *= self.moment(tuple(a for i in cycle for a in blocks[i - 1]))
            total.append(weight * factor)
        return math.fsum(total)

    def cumulant(self, letters: tuple[str, ...]) -> float:
        """κ_r by the first-block recursion: the block of position 1 is ``chosen``,
        and every gap between its points carries the moment of its segment."""
        if letters not in self._cumulants:
            r = len(letters)
            others = []
            for size in range(r - 1):
                for chosen in combinations(range(1, r), size):
                    points = (0,) + chosen
                    product = self.cumulant(tuple(letters[i] for i in points))
                    for lo, hi in zip(points, points[1:] + (r,)):
                        if hi > lo + 1:
                            product *= self.moment(letters[lo + 1 : hi])
                    others.append(product)
            self._cumulants[letters] = self.moment(letters) - math.fsum(others)
        return self._cumulants[letters]


def word_moment(word: Word, *, max_length: int | None = None) -> float:
    """lim_N E[Tr_N(W)] for a word in independent Brownian motions."""
    check_budget("word length", len(word), max_length or settings.word_length_max)
    return _WordEvaluator(word.times).moment(word.letters)


def word_cumulant(word: Word, *, max_length: int | None = None) -> float:
    """The free cumulant κ_r(a_{i₁}, ..., a_{i_r}) of the letters of the word."""
    check_budget("word length", len(word), max_length or settings.word_cumulant_max)
    return _WordEvaluator(word.times).cumulant(word.letters)


def chi_transform(t_value: float, z: complex) -> complex:
    return z / (z + 1) * cmath.exp(t_value * (z + 0.5))


def chi_residual(
    t_value: float,
    z: complex,
    *,
    n_cut: int | None = None,
    radius: float | None = None,
    tolerance: float = 1e-12,
) -> complex:
    """Σ_{n≥1} φ(u_t^n) χ_t(z)^n − z, which vanishes near z = 0."""
    n_cut = n_cut or settings.chi_n_cut
    radius = radius or settings.chi_radius
    if abs(z) >= radius:
        raise ValueError(f"|z| = {abs(z):g} is outside the disk of radius {radius:g}")
    chi = chi_transform(t_value, z)
    # |φ(u_t^n)| ≤ 1 bounds the discarded terms by a geometric tail
    q = abs(chi)
    if q >= 1 or q ** (n_cut + 1) / (1 - q) > tolerance:
        raise PrecisionError(f"moment series at |χ|={q:.3g} needs more than {n_cut} terms")
    total = complex(0)
    power = complex(1)
    for n in range(1, n_cut + 1):
        power *= chi
        total += limit_moment(n, t_value) * power
    return total - z
