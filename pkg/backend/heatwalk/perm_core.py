"""Permutations of {1, ..., n}, cycle types, the transposition norm and the absolute order.

Composition is "right acts first": ``compose(a, b)`` applies ``b`` then ``a``, so a
path ``σ, στ₁, στ₁τ₂, ...`` multiplies transpositions on the right.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

from .errors import DegreeMismatchError

_CYCLE_RE = re.compile(r"\(([^()]*)\)")
_CYCLE_TEXT_RE = re.compile(r"^\s*(\([^()]*\)\s*)+$")


@dataclass(frozen=True)
class CycleType:
    """A conjugacy class of S_n, stored as weakly decreasing cycle lengths."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"cycle lengths must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"cycle lengths must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, parts: Iterable[int]) -> "CycleType":
        return cls(tuple(sorted((int(p) for p in parts), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "CycleType":
        cleaned = text.strip().strip("[]()")
        tokens = [tok for tok in re.split(r"[\s,]+", cleaned) if tok]
        if not tokens:
            raise ValueError(f"empty cycle type {text!r}")
        try:
            return cls.of(int(tok) for tok in tokens)
        except ValueError as exc:
            raise ValueError(f"malformed cycle type {text!r}: {exc}") from exc

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def norm(self) -> int:
        return self.n - self.length

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def class_size(self) -> int:
        denominator = prod(m**a * factorial(a) for m, a in self.multiplicities().items())
        return factorial(self.n) // denominator

    def representative(self) -> "Permutation":
        cycles = []
        start = 1
        for part in self.parts:
            cycles.append(tuple(range(start, start + part)))
            start += part
        return Permutation.from_cycles(cycles, self.n)

    def doubled(self) -> "CycleType":
        return self.concat(self)

    def concat(self, other: "CycleType") -> "CycleType":
        return CycleType.of(self.parts + other.parts)

    def __str__(self) -> str:
        return "[" + ",".join(str(p) for p in self.parts) + "]"


@dataclass(frozen=True)
class Permutation:
    """A permutation in one-line notation: ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a bijection of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, i: int, j: int, n: int) -> "Permutation":
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"invalid transposition ({i} {j}) in S_{n}")
        images = list(range(1, n + 1))
        images[i - 1], images[j - 1] = j, i
        return cls(tuple(images))

    @classmethod
    def long_cycle(cls, n: int) -> "Permutation":
        return cls(tuple(range(2, n + 1)) + (1,)) if n > 0 else cls(())

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cycle in cycles:
            for a in cycle:
                if not 1 <= a <= n:
                    raise ValueError(f"element {a} outside 1..{n}")
                if a in seen:
                    raise ValueError(f"element {a} appears twice")
                seen.add(a)
            for a, b in zip(cycle, tuple(cycle[1:]) + tuple(cycle[:1])):
                images[a - 1] = b
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Permutation":
        """Parse cycle notation such as ``"(1 2 3)(4)"`` or ``"(1,2)"``; ``"id"`` needs ``n``."""
        stripped = text.strip()
        if stripped.lower() in {"id", "e", "()"}:
            if n is None:
                raise ValueError("the identity needs an explicit degree")
            return cls.identity(n)
        if not _CYCLE_TEXT_RE.match(stripped):
            raise ValueError(f"malformed cycle notation {text!r}")
        cycles = []
        for body in _CYCLE_RE.findall(stripped):
            tokens = [tok for tok in re.split(r"[\s,]+", body.strip()) if tok]
            cycles.append(tuple(int(tok) for tok in tokens))
        largest = max((max(c) for c in cycles if c), default=0)
        degree = largest if n is None else n
        if largest > degree:
            raise DegreeMismatchError(f"{text!r} does not fit in S_{degree}")
        return cls.from_cycles(cycles, degree)

    def inverse(self) -> "Permutation":
        images = [0] * self.n
        for i, image in enumerate(self.images, start=1):
            images[image - 1] = i
        return Permutation(tuple(images))

    def cycles(self) -> list[tuple[int, ...]]:
        """All cycles, fixed points included, each starting at its smallest element."""
        seen = [False] * (self.n + 1)
        result = []
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cycle = []
            current = start
            while not seen[current]:
                seen[current] = True
                cycle.append(current)
                current = self.images[current - 1]
            result.append(tuple(cycle))
        return result

    @property
    def cycle_count(self) -> int:
        return cycle_count(self.images)

    @property
    def norm(self) -> int:
        return self.n - self.cycle_count

    def cycle_type(self) -> CycleType:
        return CycleType.of(len(c) for c in self.cycles())

    def is_identity(self) -> bool:
        return all(image == i for i, image in enumerate(self.images, start=1))

    def __str__(self) -> str:
        if self.n == 0:
            return "()"
        return "".join("(" + " ".join(str(a) for a in c) + ")" for c in self.cycles())


def cycle_count(images: Sequence[int]) -> int:
    """ℓ of a permutation given in one-line notation."""
    n = len(images)
    seen = [False] * (n + 1)
    count = 0
    for start in range(1, n + 1):
        if seen[start]:
            continue
        count += 1
        current = start
        while not seen[current]:
            seen[current] = True
            current = images[current - 1]
    return count


def _require_same_degree(a: Permutation, b: Permutation) -> None:
    if a.n != b.n:
        raise DegreeMismatchError(f"degree mismatch: S_{a.n} vs S_{b.n}")


def compose(a: Permutation, b: Permutation) -> Permutation:
    _require_same_degree(a, b)
    return Permutation(tuple(a.images[i - 1] for i in b.images))


def cycle_type(sigma: Permutation) -> CycleType:
    return sigma.cycle_type()


def norm(sigma: Permutation) -> int:
    return sigma.norm


def leq_abs(a: Permutation, b: Permutation) -> bool:
    _require_same_degree(a, b)
    return a.norm + compose(a.inverse(), b).norm == b.norm


def transposition_pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def all_permutations(n: int) -> Iterator[Permutation]:
    for images in permutations(range(1, n + 1)):
        yield Permutation(images)


def _descending(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _descending(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[CycleType, ...]:
    """Partitions of n in lexicographic order of their descending parts."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return tuple(CycleType(p) for p in sorted(_descending(n, n)))
