"""Schur–Weyl operators on (C^N)^{⊗n}: permutations, Brauer diagrams and Casimir elements.

Matrices act on row-major multi-indices ``(i_1, ..., i_n)``. Entry ``[out, in]`` of
ρ(β) is the product over the pairs of β of a weight: 1 for a pair joining the two
rows with equal indices, δ or J for a pair inside one row (orthogonal or
symplectic flavor). Every identity is checked on exact rational matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, prod
from typing import Iterator, Sequence

import numpy as np
import sympy as sp

from .config import settings
from .errors import DegreeMismatchError, IdentityViolation, check_budget
from .models import Flavor, Group
from .perm_core import Permutation, transposition_pairs
from .random_matrix import haar_unitary
from .schemas import CasimirReport

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class BrauerDiagram:
    """A perfect matching of {1, ..., 2n}; 1..n is the top row, n+1..2n the bottom row."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.pairs))
        points = sorted(p for pair in pairs for p in pair)
        if points != list(range(1, 2 * self.n + 1)):
            raise ValueError(f"{pairs} is not a perfect matching of 1..{2 * self.n}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def identity(cls, n: int) -> "BrauerDiagram":
        return cls.from_permutation(Permutation.identity(n))

    @classmethod
    def from_permutation(cls, sigma: Permutation) -> "BrauerDiagram":
        n = sigma.n
        return cls(n, tuple((j, sigma(j) + n) for j in range(1, n + 1)))

    @classmethod
    def bracket(cls, k: int, l: int, n: int) -> "BrauerDiagram":
        """⟨kl⟩: k and l joined on the top row, n+k and n+l on the bottom row."""
        if not 1 <= k < l <= n:
            raise ValueError(f"need 1 <= k < l <= n, got ({k}, {l}) with n={n}")
        rest = tuple((i, i + n) for i in range(1, n + 1) if i not in (k, l))
        return cls(n, ((k, l), (n + k, n + l)) + rest)

    def partner(self, point: int) -> int:
        for a, b in self.pairs:
            if a == point:
                return b
            if b == point:
                return a
        raise ValueError(f"{point} outside 1..{2 * self.n}")

    def top_pairs(self) -> tuple[tuple[int, int], ...]:
        """T(β): chords joining two dots of the top row."""
        return tuple((a, b) for a, b in self.pairs if b <= self.n)

    def is_permutation(self) -> bool:
        return all(a <= self.n < b for a, b in self.pairs)

    def to_permutation(self) -> Permutation:
        if not self.is_permutation():
            raise ValueError(f"{self} is not a permutation")
        images = [0] * self.n
        for a, b in self.pairs:
            images[a - 1] = b - self.n
        return Permutation(tuple(images))

    def loop_count(self) -> int:
        """ℓ(β): cycles of the graph obtained by identifying the two rows."""
        parent = list(range(self.n + 1))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.pairs:
            ra, rb = find((a - 1) % self.n + 1), find((b - 1) % self.n + 1)
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(1, self.n + 1)})

    def __str__(self) -> str:
        return "{" + ",".join(f"{{{a},{b}}}" for a, b in self.pairs) + "}"


def enumerate_brauer(n: int) -> list[BrauerDiagram]:
    """All (2n-1)!! diagrams of B_n."""

    def matchings(points: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
        if not points:
            yield ()
            return
        first = points[0]
        for i in range(1, len(points)):
            rest = points[1:i] + points[i + 1 :]
            for others in matchings(rest):
                yield ((first, points[i]),) + others

    check_budget("Brauer degree", n, settings.n_max)
    return [BrauerDiagram(n, pairs) for pairs in matchings(tuple(range(1, 2 * n + 1)))]


def brauer_compose(a: BrauerDiagram, b: BrauerDiagram) -> tuple[BrauerDiagram, int]:
    """ab with b's bottom row glued to a's top row, and the number of closed loops."""
    if a.n != b.n:
        raise DegreeMismatchError(f"degree mismatch: B_{a.n} vs B_{b.n}")
    n = a.n

    def b_node(p: int) -> tuple[str, int]:
        return ("top", p) if p <= n else ("mid", p - n)

    def a_node(p: int) -> tuple[str, int]:
        return ("mid", p) if p <= n else ("bottom", p - n)

    b_edges: dict[tuple[str, int], tuple[str, int]] = {}
    for x, y in b.pairs:
        b_edges[b_node(x)], b_edges[b_node(y)] = b_node(y), b_node(x)
    a_edges: dict[tuple[str, int], tuple[str, int]] = {}
    for x, y in a.pairs:
        a_edges[a_node(x)], a_edges[a_node(y)] = a_node(y), a_node(x)

    seen_mid: set[int] = set()
    pairs: list[tuple[int, int]] = []
    ends: set[tuple[str, int]] = set()

    def label(node: tuple[str, int]) -> int:
        return node[1] if node[0] == "top" else node[1] + n

    starts = [("top", i) for i in range(1, n + 1)] + [("bottom", i) for i in range(1, n + 1)]
    for start in starts:
        if start in ends:
            continue
        edges = b_edges if start[0] == "top" else a_edges
        node = edges[start]
        while node[0] == "mid":
            seen_mid.add(node[1])
            edges = a_edges if edges is b_edges else b_edges
            node = edges[node]
        ends.update((start, node))
        pairs.append((label(start), label(node)))

    loops = 0
    for i in range(1, n + 1):
        if i in seen_mid:
            continue
        loops += 1
        node, edges = ("mid", i), b_edges
        while True:
            seen_mid.add(node[1])
            node = edges[node]
            edges = a_edges if edges is b_edges else b_edges
            if node == ("mid", i):
                break
    return BrauerDiagram(n, tuple(pairs)), loops


def invertible_elements(n: int) -> list[BrauerDiagram]:
    """Diagrams with a two-sided inverse in the monoid B_n (loops dropped)."""
    elements = enumerate_brauer(n)
    identity = BrauerDiagram.identity(n)
    result = []
    for a in elements:
        if any(
            brauer_compose(a, b)[0] == identity and brauer_compose(b, a)[0] == identity
            for b in elements
        ):
            result.append(a)
    return result


@dataclass(frozen=True, eq=False)
class TensorOperator:
    """An exact rational matrix on (C^dim)^{⊗n}: ``numerator / denominator``."""

    n: int
    dim: int
    numerator: np.ndarray
    denominator: int = 1

    @classmethod
    def scalar(cls, n: int, dim: int, value: Fraction | int) -> "TensorOperator":
        value = Fraction(value)
        eye = np.eye(dim**n, dtype=np.int64) * value.numerator
        return cls(n, dim, eye, value.denominator)

    def _rescaled(self, denominator: int) -> np.ndarray:
        return self.numerator * (denominator // self.denominator)

    def _check(self, other: "TensorOperator") -> None:
        if (self.n, self.dim) != (other.n, other.dim):
            raise DegreeMismatchError(
                f"operators on ({self.dim})^{self.n} and ({other.dim})^{other.n}"
            )

    def __add__(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        d = self.denominator * other.denominator // gcd(self.denominator, other.denominator)
        return TensorOperator(self.n, self.dim, self._rescaled(d) + other._rescaled(d), d)

    def __neg__(self) -> "TensorOperator":
        return TensorOperator(self.n, self.dim, -self.numerator, self.denominator)

    def __sub__(self, other: "TensorOperator") -> "TensorOperator":
        return self + (-other)

    def scaled(self, factor: Fraction | int) -> "TensorOperator":
        factor = Fraction(factor)
        return TensorOperator(
            self.n, self.dim, self.numerator * factor.numerator, self.denominator * factor.denominator
        )

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        return TensorOperator(
            self.n, self.dim, self.numerator @ other.numerator, self.denominator * other.denominator
        )

    def trace(self) -> Fraction:
        return Fraction(int(np.trace(self.numerator)), self.denominator)

    def entry(self, row: int, col: int) -> Fraction:
        return Fraction(int(self.numerator[row, col]), self.denominator)

    def as_float(self) -> np.ndarray:
        return self.numerator / self.denominator

    def first_mismatch(self, other: "TensorOperator") -> tuple[int, int] | None:
        self._check(other)
        diff = self.numerator * other.denominator - other.numerator * self.denominator
        rows, cols = np.nonzero(diff)
        if rows.size == 0:
            return None
        return int(rows[0]), int(cols[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return (self.n, self.dim) == (other.n, other.dim) and self.first_mismatch(other) is None


def _pair_values(dim: int, flavor: Flavor) -> list[tuple[int, int, int]]:
    """(value at the smaller point, value at the larger point, weight) for a same-row pair."""
    if flavor == Flavor.ORTHOGONAL:
        return [(v, v, 1) for v in range(dim)]
    half = dim // 2
    # J = [[0, I], [-I, 0]]
    return [(v, v + half, 1) for v in range(half)] + [(v + half, v, -1) for v in range(half)]


def rho(
    beta: BrauerDiagram | Permutation,
    dim: int,
    flavor: Flavor = Flavor.ORTHOGONAL,
    *,
    matrix_budget: int | None = None,
) -> TensorOperator:
    """ρ(β) on (C^dim)^{⊗n}; for a permutation this is the place-permutation action."""
    if isinstance(beta, Permutation):
        beta = BrauerDiagram.from_permutation(beta)
    n = beta.n
    check_budget("tensor dimension", dim**n, matrix_budget or settings.matrix_budget)
    if flavor == Flavor.SYMPLECTIC and dim % 2:
        raise ValueError("the symplectic flavor needs an even dimension")
    size = dim**n
    matrix = np.zeros((size, size), dtype=np.int64)
    through = [(a, b) for a, b in beta.pairs if a <= n < b]
    same_row = [(a, b) for a, b in beta.pairs if not a <= n < b]
    choices = [[(v, v, 1) for v in range(dim)]] * len(through)
    choices += [_pair_values(dim, flavor)] * len(same_row)
    pairs = through + same_row
    strides = [dim ** (n - 1 - j) for j in range(n)]
    for assignment in product(*choices):
        row = col = 0
        weight = 1
        for (a, b), (va, vb, w) in zip(pairs, assignment):
            weight *= w
            for point, value in ((a, va), (b, vb)):
                if point <= n:
                    col += value * strides[point - 1]
                else:
                    row += value * strides[point - n - 1]
        matrix[row, col] += weight
    return TensorOperator(n, dim, matrix)


def _unit(dim: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=np.int64)
    e[i, j] = 1
    return e


CasimirTerms = list[tuple[Fraction, np.ndarray, np.ndarray]]


def u_casimir_terms(N: int) -> CasimirTerms:
    """Δ_{U(N)} = -Σ_{i,j} E_ij ⊗ E_ji."""
    return [(Fraction(-1), _unit(N, i, j), _unit(N, j, i)) for i in range(N) for j in range(N)]


def so_casimir_terms(N: int) -> CasimirTerms:
    """Δ_{SO(N)} = ½ Σ_{i<j} A_ij ⊗ A_ij with A_ij = E_ij - E_ji."""
    terms = []
    for i in range(N):
        for j in range(i + 1, N):
            a = _unit(N, i, j) - _unit(N, j, i)
            terms.append((Fraction(1, 2), a, a))
    return terms


def sp_casimir_terms(N: int) -> CasimirTerms:
    """Δ_{Sp(N)} in the A, B, C, D basis of sp(N, C) ⊂ gl(2N, C)."""
    d = 2 * N

    def e(i: int, j: int) -> np.ndarray:
        return _unit(d, i, j)

    A = {(i, j): e(i, j) - e(j + N, i + N) for i in range(N) for j in range(N)}
    terms: CasimirTerms = [(Fraction(-1, 2), A[i, j], A[j, i]) for i in range(N) for j in range(N)]
    for i in range(N):
        for j in range(i + 1, N):
            B = e(i, j + N) + e(j, i + N)
            C = e(i + N, j) + e(j + N, i)
            terms += [(Fraction(-1, 2), B, C), (Fraction(-1, 2), C, B)]
    for i in range(N):
        terms += [(Fraction(-1), e(i, i + N), e(i + N, i)), (Fraction(-1), e(i + N, i), e(i, i + N))]
    return terms


def su_casimir_terms(N: int) -> CasimirTerms:
    """Δ_{SU(N)} from the sl(N) basis: off-diagonal units and the Cartan elements H_a."""
    terms: CasimirTerms = [
        (Fraction(-1), _unit(N, i, j), _unit(N, j, i)) for i in range(N) for j in range(N) if i != j
    ]
    if N < 2:
        return terms
    H = [_unit(N, a, a) - _unit(N, a + 1, a + 1) for a in range(N - 1)]
    cartan = sp.Matrix(N - 1, N - 1, lambda a, b: 2 if a == b else (-1 if abs(a - b) == 1 else 0))
    # ⟨H_a, H_b⟩ = -C_ab, so the dual pairing is -C⁻¹
    inverse = cartan.inv()
    for a in range(N - 1):
        for b in range(N - 1):
            value = inverse[a, b]
            if value:
                terms.append((-Fraction(int(value.p), int(value.q)), H[a], H[b]))
    return terms


def _embed(op: np.ndarray, sites: Sequence[int], n: int, dim: int) -> np.ndarray:
    """Place an operator on the tensor factors ``sites`` (0-based) of n factors."""
    m = len(sites)
    rest = [s for s in range(n) if s not in sites]
    full = np.kron(op, np.eye(dim ** (n - m), dtype=op.dtype))
    order = list(sites) + rest
    inverse = list(np.argsort(order))
    tensor = full.reshape([dim] * (2 * n))
    tensor = tensor.transpose(inverse + [n + p for p in inverse])
    return tensor.reshape(dim**n, dim**n)


def casimir_image(
    terms: CasimirTerms, n: int, dim: int, *, matrix_budget: int | None = None
) -> TensorOperator:
    """ρ(1 ⊗ Σ c X⊗Y) = Σ c (Σ_{k≠l} X_k Y_l + Σ_k (XY)_k)."""
    check_budget("tensor dimension", dim**n, matrix_budget or settings.matrix_budget)
    total = np.zeros((dim**n, dim**n), dtype=np.int64)
    if not terms:
        return TensorOperator(n, dim, total)
    denominator = 1
    for c, _, _ in terms:
        denominator = denominator * c.denominator // gcd(denominator, c.denominator)
    two_site = sum(int(c * denominator) * np.kron(x, y) for c, x, y in terms)
    one_site = sum(int(c * denominator) * (x @ y) for c, x, y in terms)
    for k in range(n):
        total += _embed(one_site, [k], n, dim)
        for l in range(n):
            if l != k:
                total += _embed(two_site, [k, l], n, dim)
    return TensorOperator(n, dim, total, denominator)


def symmetric_laplacian(n: int, dim: int, flavor: Flavor = Flavor.ORTHOGONAL) -> TensorOperator:
    """ρ(Δ_{S_n}) = -n(n-1)/2 + Σ_τ ρ(τ)."""
    result = TensorOperator.scalar(n, dim, Fraction(-n * (n - 1), 2))
    for i, j in transposition_pairs(n):
        result = result + rho(Permutation.transposition(i, j, n), dim, flavor)
    return result


def brauer_laplacian(n: int, dim: int, flavor: Flavor) -> TensorOperator:
    """ρ(Δ_{B_n}) = -n(n-1)/2 + Σ_{k<l} ρ(⟨kl⟩)."""
    result = TensorOperator.scalar(n, dim, Fraction(-n * (n - 1), 2))
    for k, l in transposition_pairs(n):
        result = result + rho(BrauerDiagram.bracket(k, l, n), dim, flavor)
    return result


def _identity_sides(group: Group, n: int, N: int) -> tuple[TensorOperator, TensorOperator, Fraction]:
    if group in (Group.U, Group.SU):
        scalar = Fraction(-(N * n + n * (n - 1)), 2)
        lhs = symmetric_laplacian(n, N) + casimir_image(u_casimir_terms(N), n, N).scaled(Fraction(1, 2))
        return lhs, TensorOperator.scalar(n, N, scalar), scalar
    if group == Group.SO:
        scalar = Fraction(-(N - 1) * n, 2)
        lhs = symmetric_laplacian(n, N) + casimir_image(so_casimir_terms(N), n, N)
        rhs = TensorOperator.scalar(n, N, scalar) + brauer_laplacian(n, N, Flavor.ORTHOGONAL)
        return lhs, rhs, scalar
    dim = 2 * N
    scalar = Fraction(-(2 * N + 1) * n, 2)
    lhs = symmetric_laplacian(n, dim, Flavor.SYMPLECTIC) + casimir_image(sp_casimir_terms(N), n, dim)
    rhs = TensorOperator.scalar(n, dim, scalar) + brauer_laplacian(n, dim, Flavor.SYMPLECTIC)
    return lhs, rhs, scalar


def casimir_identity_check(group: Group, n: int, N: int, *, strict: bool = False) -> CasimirReport:
    """Check the Casimir/Laplacian identity for U(N), SO(N) or Sp(N) on n tensor factors.

    For Sp(N) the operators act on (C^{2N})^{⊗n}. With ``strict`` a failure raises
    :class:`IdentityViolation` naming the first offending entry.
    """
    if n < 1 or N < 1:
        raise ValueError("n and N must be positive")
    if group == Group.SU:
        group = Group.U
    lhs, rhs, scalar = _identity_sides(group, n, N)
    mismatch = lhs.first_mismatch(rhs)
    deviation = float(np.max(np.abs(lhs.as_float() - rhs.as_float()), initial=0.0))
    report = CasimirReport(
        group=group,
        n=n,
        N=N,
        dimension=lhs.dim**n,
        holds=mismatch is None,
        scalar=str(scalar),
        max_deviation=deviation,
        offending_entry=list(mismatch) if mismatch else None,
        lhs=str(lhs.entry(*mismatch)) if mismatch else None,
        rhs=str(rhs.entry(*mismatch)) if mismatch else None,
    )
    if mismatch is not None:
        LOGGER.warning("Casimir identity fails for %s n=%s N=%s at %s", group.value, n, N, mismatch)
        if strict:
            raise IdentityViolation(
                f"{group.value} Casimir identity", mismatch, lhs.entry(*mismatch), rhs.entry(*mismatch)
            )
    return report


def su_shift_check(n: int, N: int) -> bool:
    """ρ(1⊗Δ_SU) = ρ(1⊗Δ_U) + (n²/N) Id, with Δ_SU built from sl(N) alone."""
    su = casimir_image(su_casimir_terms(N), n, N)
    u = casimir_image(u_casimir_terms(N), n, N)
    expected = u + TensorOperator.scalar(n, N, Fraction(n * n, N))
    mismatch = su.first_mismatch(expected)
    if mismatch is not None:
        LOGGER.warning("SU shift fails for n=%s N=%s at %s", n, N, mismatch)
    return mismatch is None


def tensor_power(u: np.ndarray, n: int) -> np.ndarray:
    result = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        result = np.kron(result, u)
    return result


def power_sum(sigma: Permutation, u: np.ndarray) -> complex:
    """p^{st}_σ(U) = ∏ Tr(U^m) over the cycle lengths m of σ."""
    return prod(complex(np.trace(np.linalg.matrix_power(u, m))) for m in sigma.cycle_type().parts)


def _sampled_unitaries(N: int, samples: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [haar_unitary(rng, N) for _ in range(samples)]


def laplacian_action_check(
    sigma: Permutation,
    N: int,
    samples: int = 10,
    *,
    seed: int = 0,
    unitaries: Sequence[np.ndarray] | None = None,
) -> float:
    """max |½Δ p_σ(U) - (-(Nn/2) p_σ(U) - Σ_τ p_{στ}(U))| over sampled U.

    The left side is Tr(U^{⊗n} ρ(σ) ρ(1 ⊗ ½Δ_U)).
    """
    n = sigma.n
    half_laplacian = casimir_image(u_casimir_terms(N), n, N).scaled(Fraction(1, 2)).as_float()
    perm = rho(sigma, N).as_float()
    if unitaries is None:
        unitaries = _sampled_unitaries(N, samples, seed)
    worst = 0.0
    for u in unitaries:
        lhs = np.trace(tensor_power(u, n) @ perm @ half_laplacian)
        rhs = -N * n / 2 * power_sum(sigma, u)
        for i, j in transposition_pairs(n):
            rhs -= power_sum(sigma * Permutation.transposition(i, j, n), u)
        worst = max(worst, abs(lhs - rhs))
    return worst


def commutation_check(
    sigma: Permutation, N: int, samples: int = 5, *, seed: int = 0
) -> float:
    """max ‖ρ(σ) U^{⊗n} - U^{⊗n} ρ(σ)‖_max over sampled U."""
    perm = rho(sigma, N).as_float()
    worst = 0.0
    for u in _sampled_unitaries(N, samples, seed):
        power = tensor_power(u, sigma.n)
        worst = max(worst, float(np.max(np.abs(perm @ power - power @ perm))))
    return worst
