"""Random ramified coverings seen through their monodromy.

A covering with k generic branch points is recorded by the monodromy σ_start of the
fixed class λ and the transpositions τ₁, ..., τ_k of the branch points. Positions of
the branch points are never drawn: every observable here depends only on k and on
σ_end = σ_start τ₁ ⋯ τ_k.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

import mpmath
import numpy as np

from .class_walk import path_count_table
from .errors import DegreeMismatchError, MalformedPathError
from .expansion import moment_value
from .mc_sim import compare, summarize
from .perm_core import CycleType, Permutation, compose, transposition_pairs
from .schemas import CheckResult
from .workers import SampleWorkerPool

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoveringSample:
    k: int
    taus: tuple[tuple[int, int], ...]
    sigma_start: Permutation
    sigma_end: Permutation
    chi: int

    @property
    def defect(self) -> int:
        """d with χ = ℓ(λ) - 2d."""
        return (self.sigma_start.cycle_count - self.chi) // 2

    @property
    def sign_weight(self) -> int:
        return -1 if self.k % 2 else 1


def _check_class(n: int, lam: CycleType) -> None:
    if lam.n != n:
        raise DegreeMismatchError(f"{lam} is not a partition of {n}")


def _walk(start: Permutation, taus: Sequence[tuple[int, int]]) -> Permutation:
    images = list(start.images)
    for i, j in taus:
        images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
    return Permutation(tuple(images))


def sample_covering(n: int, lam: CycleType, t: float, rng: np.random.Generator) -> CoveringSample:
    """k ~ Poisson(t·binom(n, 2)) branch points with i.i.d. uniform transpositions."""
    _check_class(n, lam)
    if t < 0:
        raise ValueError("t must be nonnegative")
    start = lam.representative()
    pairs = transposition_pairs(n)
    rate = t * comb(n, 2)
    k = int(rng.poisson(rate)) if rate > 0 else 0
    taus = tuple(pairs[i] for i in rng.integers(len(pairs), size=k)) if k else ()
    end = _walk(start, taus)
    return CoveringSample(k=k, taus=taus, sigma_start=start, sigma_end=end, chi=end.cycle_count - k)


def euler_char(
    path: Sequence[Permutation] | Permutation, taus: Sequence[tuple[int, int]] | None = None
) -> int:
    """χ = ℓ(σ_k) - k, from a path σ₀, ..., σ_k or from σ₀ and its transpositions."""
    if isinstance(path, Permutation):
        steps = list(taus or ())
        for i, j in steps:
            if i == j or not (1 <= i <= path.n and 1 <= j <= path.n):
                raise MalformedPathError(f"({i} {j}) is not a transposition of S_{path.n}")
        return _walk(path, steps).cycle_count - len(steps)
    vertices = list(path)
    if not vertices:
        raise MalformedPathError("a path needs a starting permutation")
    for position, (previous, current) in enumerate(zip(vertices, vertices[1:]), start=1):
        step = compose(previous.inverse(), current)
        if step.norm != 1:
            raise MalformedPathError(f"step {position} from {previous} to {current} is not a transposition")
    return vertices[-1].cycle_count - (len(vertices) - 1)


def genus_target(lam: CycleType, N: int, t: float) -> float:
    """e^{nt - n²t/2} N^{ℓ(λ)} E[p_σ(B_{t/N})]."""
    n = lam.n
    exact = moment_value(lam, N, t).value
    return math.exp(n * t - n * n * t / 2) * N**lam.length * exact


def genus_estimator(
    n: int,
    lam: CycleType,
    N: int,
    t: float,
    samples: int,
    *,
    seed: int = 0,
    pool: SampleWorkerPool | None = None,
) -> CheckResult:
    """Monte Carlo mean of (-1)^k N^χ, compared with :func:`genus_target`."""
    _check_class(n, lam)
    if t < 0:
        raise ValueError("t must be nonnegative")
    start = lam.representative()
    pairs = transposition_pairs(n)
    rate = t * comb(n, 2)

    def job(rng: np.random.Generator, size: int) -> np.ndarray:
        ks = rng.poisson(rate, size) if rate > 0 else np.zeros(size, dtype=int)
        moves = rng.integers(len(pairs), size=int(ks.sum())) if pairs else np.zeros(0, dtype=int)
        values = np.empty(size)
        cursor = 0
        for s in range(size):
            k = int(ks[s])
            end = _walk(start, [pairs[m] for m in moves[cursor : cursor + k]])
            cursor += k
            values[s] = (-1) ** k * float(N) ** (end.cycle_count - k)
        return values

    values = np.concatenate((pool or SampleWorkerPool()).map_chunks(job, samples, seed))
    LOGGER.debug("genus_estimator %s N=%s t=%s: %s samples", lam, N, t, samples)
    return compare(summarize(values), genus_target(lam, N, t))


def analytic_expectation(n: int, lam: CycleType, N: int, t: float, k_max: int = 40) -> float:
    """E[(-1)^k N^χ] summed exactly over k ≤ k_max with Poisson weights."""
    _check_class(n, lam)
    table = path_count_table(lam, k_max)
    ell = lam.length
    rate = comb(n, 2)
    with mpmath.workdps(30):
        N_mp, t_mp = mpmath.mpf(N), mpmath.mpf(t)
        terms = []
        for k in range(k_max + 1):
            # a uniform path has probability binom(n,2)^{-k}; the Poisson weight cancels it
            paths = mpmath.fsum(table.S(k, d) * N_mp ** (ell - 2 * d) for d in table.window(k))
            terms.append((-t_mp) ** k / mpmath.factorial(k) * paths)
        return float(mpmath.exp(-rate * t_mp) * mpmath.fsum(terms))
