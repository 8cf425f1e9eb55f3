"""Non-crossing partitions of {1, ..., n}.

A partition P is stored by its blocks, each sorted, blocks ordered by their
smallest element. Reading every block as an increasing cycle gives σ_P, and
P ↦ σ_P is a lattice isomorphism from NC(n) onto the interval [id, (1…n)] of the
absolute order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial, prod
from typing import Iterable, Iterator, Sequence

from .class_walk import count_geodesics
from .config import settings
from .errors import NotInIntervalError, check_budget
from .perm_core import Permutation, compose, leq_abs

_BLOCK_RE = re.compile(r"\{([^{}]*)\}")
_BLOCKS_TEXT_RE = re.compile(r"^\s*(\{[^{}]*\}\s*)+$")


def _canonical(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(int(a) for a in b)) for b in blocks), key=lambda b: b[0]))


def is_noncrossing(blocks: Iterable[Sequence[int]]) -> bool:
    """True when no a < b < c < d has a, c in one block and b, d in another."""
    owner: dict[int, int] = {}
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for index, block in enumerate(blocks):
        for a in block:
            owner[a] = index
        first[index], last[index] = min(block), max(block)
    open_blocks: list[int] = []
    for a in sorted(owner):
        index = owner[a]
        if a == first[index]:
            if a != last[index]:
                open_blocks.append(index)
        elif open_blocks[-1] != index:
            return False
        elif a == last[index]:
            open_blocks.pop()
    return True


@dataclass(frozen=True)
class NCPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = _canonical(self.blocks)
        if any(not b for b in blocks):
            raise ValueError("blocks must be nonempty")
        elements = sorted(a for b in blocks for a in b)
        if elements != list(range(1, self.n + 1)):
            raise ValueError(f"blocks {blocks} do not partition 1..{self.n}")
        if not is_noncrossing(blocks):
            raise ValueError(f"blocks {blocks} cross")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def zero(cls, n: int) -> "NCPartition":
        return cls(n, tuple((a,) for a in range(1, n + 1)))

    @classmethod
    def one(cls, n: int) -> "NCPartition":
        return cls(n, (tuple(range(1, n + 1)),))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "NCPartition":
        """Parse block notation such as ``"{1,3}{2}"``."""
        if not _BLOCKS_TEXT_RE.match(text):
            raise ValueError(f"malformed block notation {text!r}")
        blocks = []
        for body in _BLOCK_RE.findall(text):
            tokens = [tok for tok in re.split(r"[\s,]+", body.strip()) if tok]
            if not tokens:
                raise ValueError(f"empty block in {text!r}")
            blocks.append(tuple(int(tok) for tok in tokens))
        size = max(max(b) for b in blocks) if n is None else n
        return cls(size, tuple(blocks))

    @property
    def rank(self) -> int:
        return self.n - len(self.blocks)

    def type_vector(self) -> tuple[int, ...]:
        """(s₁, ..., sₙ) with s_i the number of blocks of size i."""
        counts = [0] * self.n
        for block in self.blocks:
            counts[len(block) - 1] += 1
        return tuple(counts)

    def refines(self, other: "NCPartition") -> bool:
        if self.n != other.n:
            return False
        owner = {a: i for i, b in enumerate(other.blocks) for a in b}
        return all(len({owner[a] for a in block}) == 1 for block in self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(str(a) for a in b) + "}" for b in self.blocks)


def _interval_partitions(points: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if not points:
        yield []
        return
    head, rest = points[0], points[1:]
    for size in range(len(rest) + 1):
        for chosen in combinations(range(len(rest)), size):
            block = (head,) + tuple(rest[i] for i in chosen)
            # the gaps between consecutive block elements are partitioned independently
            bounds = (-1,) + chosen + (len(rest),)
            gaps = [rest[lo + 1 : hi] for lo, hi in zip(bounds, bounds[1:])]
            for pieces in _product_of_gaps(gaps):
                yield [block] + pieces


def _product_of_gaps(gaps: list[tuple[int, ...]]) -> Iterator[list[tuple[int, ...]]]:
    if not gaps:
        yield []
        return
    for first in _interval_partitions(gaps[0]):
        for others in _product_of_gaps(gaps[1:]):
            yield first + others


def enumerate_nc(n: int, *, n_max: int | None = None) -> list[NCPartition]:
    """All of NC(n), Catalan(n) of them."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    check_budget("NC(n) degree", n, n_max or settings.nc_n_max)
    return [NCPartition(n, tuple(blocks)) for blocks in _interval_partitions(tuple(range(1, n + 1)))]


def nc_to_perm(partition: NCPartition) -> Permutation:
    return Permutation.from_cycles(partition.blocks, partition.n)


def perm_to_nc(sigma: Permutation) -> NCPartition:
    if not leq_abs(sigma, Permutation.long_cycle(sigma.n)):
        raise NotInIntervalError(f"{sigma} is not below the long cycle (1…{sigma.n})")
    return NCPartition(sigma.n, tuple(sigma.cycles()))


def kreweras(partition: NCPartition) -> NCPartition:
    """K(P), read off from K(σ) = σ⁻¹(1…n)."""
    sigma = nc_to_perm(partition)
    return perm_to_nc(compose(sigma.inverse(), Permutation.long_cycle(partition.n)))


def kreweras_by_interleaving(partition: NCPartition) -> NCPartition:
    """K(P) as the coarsest Q on 1′ < ... < n′ with P ∪ Q non-crossing.

    With i′ placed between i and i+1, the chord j′k′ (j < k) avoids P exactly when
    every block of P lies inside or outside {j+1, ..., k}.
    """
    def joinable(j: int, k: int) -> bool:
        inside = set(range(j + 1, k + 1))
        return all({a in inside for a in block} != {True, False} for block in partition.blocks)

    blocks: list[list[int]] = []
    for k in range(1, partition.n + 1):
        for block in blocks:
            if joinable(block[0], k):
                block.append(k)
                break
        else:
            blocks.append([k])
    return NCPartition(partition.n, tuple(tuple(b) for b in blocks))


def count_by_type(n: int, s: Sequence[int]) -> int:
    """Number of partitions in NC(n) with type vector s."""
    if any(v < 0 for v in s):
        raise ValueError(f"negative entry in type vector {tuple(s)}")
    if sum(i * v for i, v in enumerate(s, start=1)) != n:
        raise ValueError(f"type vector {tuple(s)} is not a partition of {n}")
    rank = n - sum(s)
    return factorial(n) // (factorial(rank + 1) * prod(factorial(v) for v in s))


def count_increasing_paths(partition: NCPartition) -> int:
    """Maximal chains from 0_n up to P, equivalently geodesics id → σ_P."""
    return count_geodesics(nc_to_perm(partition))


def s_cycle_zero_defect(n: int, k: int) -> int:
    """S((1…n), k, 0) = binom(n, k+1) n^{k-1}, zero once k ≥ n."""
    if k < 0 or k >= n:
        return 0
    return comb(n, k + 1) * n**k // n
