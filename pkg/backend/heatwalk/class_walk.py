"""Counting transposition paths in the Cayley graph of S_n.

``S(σ, k, d)`` counts the paths ``σ, στ₁, ..., στ₁⋯τ_k`` with ``d`` steps that merge
two cycles. A path's defect is fixed by its endpoints,
``2d = k - (ℓ(end) - ℓ(start))``, so the dynamic programme only tracks the class of
the current vertex.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial, prod
from typing import Literal

import mpmath
import numpy as np

from .config import settings
from .errors import DegreeMismatchError, PrecisionError, check_budget
from .perm_core import (
    CycleType,
    Permutation,
    all_permutations,
    compose,
    partitions,
    transposition_pairs,
)
from .store import get_store

LOGGER = logging.getLogger(__name__)

_TAIL_CAP = 4000


@dataclass(frozen=True)
class ClassTransitionMatrix:
    n: int
    index: tuple[CycleType, ...]
    counts: tuple[tuple[int, ...], ...]
    _positions: dict[CycleType, int] = field(init=False, repr=False, compare=False)
    _rows: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_positions", {lam: i for i, lam in enumerate(self.index)})
        rows = tuple(
            tuple((j, c) for j, c in enumerate(row) if c) for row in self.counts
        )
        object.__setattr__(self, "_rows", rows)

    def position(self, lam: CycleType) -> int:
        try:
            return self._positions[CycleType(lam.parts)]
        except KeyError:
            raise DegreeMismatchError(f"{lam} is not a partition of {self.n}") from None

    def count(self, lam: CycleType, mu: CycleType) -> int:
        return self.counts[self.position(lam)][self.position(mu)]

    def sparse_row(self, i: int) -> tuple[tuple[int, int], ...]:
        return self._rows[i]

    def step(self, vector: list[int]) -> list[int]:
        result = [0] * len(self.index)
        for i, weight in enumerate(vector):
            if not weight:
                continue
            for j, c in self._rows[i]:
                result[j] += weight * c
        return result


@dataclass(frozen=True)
class PathCountTable:
    base: CycleType
    k_max: int
    table: tuple[tuple[int, ...], ...]

    def S(self, k: int, d: int) -> int:
        if k < 0 or k > self.k_max or d < 0 or d > k:
            return 0
        return self.table[k][d]

    def window(self, k: int) -> range:
        """Defects allowed at length k by the window ``2d - (ℓ-1) ≤ k ≤ 2d + (n-ℓ)``."""
        ell, n = self.base.length, self.base.n
        low = max(0, -(-(k - (n - ell)) // 2))
        high = min(k, (k + ell - 1) // 2)
        return range(low, high + 1)

    def to_rows(self) -> list[tuple[int, int, int]]:
        return [(k, d, self.S(k, d)) for k in range(self.k_max + 1) for d in self.window(k)]


def _class_moves(parts: tuple[int, ...]) -> Counter[tuple[int, ...]]:
    moves: Counter[tuple[int, ...]] = Counter()

    def canonical(values: list[int]) -> tuple[int, ...]:
        return tuple(sorted(values, reverse=True))

    for i, m in enumerate(parts):
        rest = list(parts[:i] + parts[i + 1 :])
        for s in range(1, m // 2 + 1):
            # splitting an m-cycle into s and m-s
            moves[canonical(rest + [s, m - s])] += m // 2 if 2 * s == m else m
    for i, j in combinations(range(len(parts)), 2):
        rest = [p for pos, p in enumerate(parts) if pos not in (i, j)]
        moves[canonical(rest + [parts[i] + parts[j]])] += parts[i] * parts[j]
    return moves


def _build_transition_counts(n: int) -> ClassTransitionMatrix:
    index = partitions(n)
    positions = {lam.parts: i for i, lam in enumerate(index)}
    counts = []
    total = comb(n, 2)
    for lam in index:
        row = [0] * len(index)
        for target, c in _class_moves(lam.parts).items():
            row[positions[target]] += c
        if sum(row) != total:  # pragma: no cover - guard
            raise AssertionError(f"row {lam} sums to {sum(row)}, expected {total}")
        counts.append(tuple(row))
    return ClassTransitionMatrix(n=n, index=index, counts=tuple(counts))


def transition_counts(n: int) -> ClassTransitionMatrix:
    if n < 1:
        raise ValueError("n must be at least 1")
    return get_store().get_or_build("transitions", n, lambda: _build_transition_counts(n))


def class_graph_edges(n: int) -> list[tuple[CycleType, CycleType, int]]:
    """The Cayley graph of S_n modulo conjugation, one edge per nonzero count."""
    matrix = transition_counts(n)
    return [
        (matrix.index[i], matrix.index[j], c)
        for i in range(len(matrix.index))
        for j, c in matrix.sparse_row(i)
    ]


def _build_path_table(lam: CycleType, k_max: int) -> PathCountTable:
    matrix = transition_counts(lam.n)
    ell = lam.length
    vector = [0] * len(matrix.index)
    vector[matrix.position(lam)] = 1
    rows = []
    for k in range(k_max + 1):
        row = [0] * (k + 1)
        for j, weight in enumerate(vector):
            if weight:
                d2 = ell + k - matrix.index[j].length
                row[d2 // 2] += weight
        rows.append(tuple(row))
        if k < k_max:
            vector = matrix.step(vector)
    return PathCountTable(base=lam, k_max=k_max, table=tuple(rows))


def path_count_table(lam: CycleType, k_max: int) -> PathCountTable:
    store = get_store()
    cached = store.get("paths", lam)
    if cached is not None and cached.k_max >= k_max:
        if cached.k_max == k_max:
            return cached
        return PathCountTable(base=lam, k_max=k_max, table=cached.table[: k_max + 1])
    table = _build_path_table(lam, k_max)
    return store.put("paths", lam, table)


def count_S(lam: CycleType, k: int, d: int) -> int:
    if k < 0 or d < 0 or d > k:
        return 0
    return path_count_table(lam, k).S(k, d)


def count_geodesics(pi: Permutation) -> int:
    """Number of factorizations of ``pi`` into ``|pi|`` transpositions."""
    parts = pi.cycle_type().parts
    denominator = prod(factorial(m - 1) for m in parts)
    return factorial(pi.norm) // denominator * prod(m ** (m - 2) for m in parts if m >= 2)


def _group_path_count(source: Permutation, target: Permutation, k: int) -> int:
    pairs = transposition_pairs(source.n)
    current: Counter[tuple[int, ...]] = Counter({source.images: 1})
    for _ in range(k):
        following: Counter[tuple[int, ...]] = Counter()
        for images, weight in current.items():
            for i, j in pairs:
                moved = list(images)
                moved[i - 1], moved[j - 1] = moved[j - 1], moved[i - 1]
                following[tuple(moved)] += weight
        current = following
    return current.get(target.images, 0)


def count_paths_between(
    sigma: Permutation,
    sigma_prime: Permutation,
    k: int,
    *,
    method: Literal["auto", "group", "character"] = "auto",
    group_dp_max: int | None = None,
) -> int:
    """#Π_k(σ → σ′), by full-group DP or by the class-sum character formula."""
    if sigma.n != sigma_prime.n:
        raise DegreeMismatchError(f"degree mismatch: S_{sigma.n} vs S_{sigma_prime.n}")
    if k < 0:
        return 0
    if method == "group":
        check_budget("group DP degree", sigma.n, group_dp_max or settings.group_dp_max)
        return _group_path_count(sigma, sigma_prime, k)
    from .sym_char import class_path_count

    return class_path_count(compose(sigma.inverse(), sigma_prime).cycle_type(), k)


def _same_cycle(images: list[int], i: int, j: int) -> bool:
    current = images[i - 1]
    while current != i:
        if current == j:
            return True
        current = images[current - 1]
    return False


def brute_force_counts(sigma: Permutation, k: int, *, budget: int | None = None) -> list[int]:
    """[S(σ, k, 0), ..., S(σ, k, k)] by literal enumeration of T_n^k."""
    if k < 0:
        return []
    pairs = transposition_pairs(sigma.n)
    check_budget("transposition paths", len(pairs) ** k, budget or settings.enumeration_budget)
    images = list(sigma.images)
    counts = [0] * (k + 1)

    def walk(depth: int, defect: int) -> None:
        if depth == k:
            counts[defect] += 1
            return
        for i, j in pairs:
            merges = not _same_cycle(images, i, j)
            images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
            walk(depth + 1, defect + merges)
            images[i - 1], images[j - 1] = images[j - 1], images[i - 1]

    walk(0, 0)
    return counts


def brute_force_S(sigma: Permutation, k: int, d: int, *, budget: int | None = None) -> int:
    """S(σ, k, d) by literal enumeration of T_n^k."""
    if k < 0 or d < 0 or d > k:
        return 0
    return brute_force_counts(sigma, k, budget=budget)[d]


def poisson_tail(rate: mpmath.mpf, k0: int) -> mpmath.mpf:
    """Σ_{k ≥ k0} rate^k / k!."""
    if k0 <= 0:
        return mpmath.exp(rate)
    if rate == 0:
        return mpmath.mpf(0)
    return mpmath.exp(rate) * mpmath.gammainc(k0, 0, rate, regularized=True)


def transfer_matrix(
    n: int,
    sign: int,
    t: float,
    N: float,
    *,
    precision: int = 30,
    n_max: int | None = None,
) -> np.ndarray:
    """Entries ``M^ε_{σσ′} = N^{ℓ(σ′)-ℓ(σ)} Σ_k (εt/N)^k #Π_k(σ→σ′)/k!`` over S_n.

    Rows and columns follow ``all_permutations(n)``. Entries are ``mpmath.mpf`` at
    ``precision`` digits with a certified truncation tail below ``10**-precision``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    check_budget("transfer matrix degree", n, n_max or settings.transfer_n_max)
    elements = list(all_permutations(n))
    matrix = transition_counts(n)
    identity_class = CycleType((1,) * n)
    with mpmath.workdps(precision + 10):
        s = mpmath.mpf(sign) * mpmath.mpf(t) / mpmath.mpf(N)
        rate = abs(s) * comb(n, 2)
        tolerance = mpmath.mpf(10) ** (-precision)
        k_cut = 0
        while poisson_tail(rate, k_cut + 1) > tolerance:
            k_cut += 1
            if k_cut > _TAIL_CAP:
                raise PrecisionError(f"no truncation below 1e-{precision} within {_TAIL_CAP} terms")
        LOGGER.debug("transfer_matrix n=%s truncated at k=%s", n, k_cut)
        sizes = [lam.class_size() for lam in matrix.index]
        g = [mpmath.mpf(0)] * len(matrix.index)
        vector = [0] * len(matrix.index)
        vector[matrix.position(identity_class)] = 1
        term = mpmath.mpf(1)
        for k in range(k_cut + 1):
            for j, weight in enumerate(vector):
                if weight:
                    g[j] += term * (weight // sizes[j])
            vector = matrix.step(vector)
            term = term * s / (k + 1)
        g_by_class = {lam: g[j] for j, lam in enumerate(matrix.index)}
        N_mp = mpmath.mpf(N)
        result = np.empty((len(elements), len(elements)), dtype=object)
        for a, sigma in enumerate(elements):
            inverse = sigma.inverse()
            for b, tau in enumerate(elements):
                shift = tau.cycle_count - sigma.cycle_count
                value = g_by_class[compose(inverse, tau).cycle_type()]
                result[a, b] = value * N_mp**shift
    return result
