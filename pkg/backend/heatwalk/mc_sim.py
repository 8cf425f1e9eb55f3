"""Monte Carlo Brownian motion on U(N) for the scalar product -Tr(XY).

Paths use the geometric Euler scheme ``B_{k+1} = B_k · exp(√δ G_k)``. Every step is
exactly unitary up to rounding, and the drift -N/2 comes out of E[G²] = -N·Id without
an explicit correction term.
"""

from __future__ import annotations

import logging
import math
from math import comb

import numpy as np
from scipy.linalg import expm

from .config import settings
from .expansion import moment_value
from .export import write_trace_csv
from .perm_core import CycleType, Permutation, transposition_pairs
from .random_matrix import gaussian_u_algebra, haar_unitary
from .schemas import CheckResult, SimConfig, SimResult
from .workers import SampleWorkerPool, chunk_rng

LOGGER = logging.getLogger(__name__)

# disjoint from the one-element keys of the sample chunks
_CONJUGATION_KEY = (0, 1)


def _brownian_batch(
    rng: np.random.Generator, N: int, steps: int, delta: float, batch: int
) -> np.ndarray:
    current = np.broadcast_to(np.eye(N, dtype=complex), (batch, N, N)).copy()
    if delta == 0:
        return current
    scale = math.sqrt(delta)
    identity = np.eye(N)
    repairs = 0
    for _ in range(steps):
        current = current @ expm(scale * gaussian_u_algebra(rng, N, batch))
        defect = np.abs(np.conj(np.swapaxes(current, -1, -2)) @ current - identity).max(axis=(-2, -1))
        drifted = defect > settings.unitarity_tol
        if drifted.any():
            # polar factor of B is the nearest unitary
            u, _, vh = np.linalg.svd(current[drifted])
            current[drifted] = u @ vh
            repairs += int(drifted.sum())
    if repairs:
        LOGGER.warning("Re-unitarized %s of %s sample steps (N=%s)", repairs, batch * steps, N)
    return current


def sample_brownian(cfg: SimConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """One draw of B at ``cfg.horizon``."""
    rng = rng if rng is not None else chunk_rng(cfg.seed, 0)
    return _brownian_batch(rng, cfg.N, cfg.steps, cfg.delta, 1)[0]


def _trace_powers(matrices: np.ndarray, m_max: int) -> list[np.ndarray]:
    """``traces[m]`` holds Tr(B^m) for every sample, unnormalized."""
    traces = [np.full(len(matrices), matrices.shape[-1], dtype=complex)]
    power = matrices
    for m in range(1, m_max + 1):
        if m > 1:
            power = power @ matrices
        traces.append(np.trace(power, axis1=-2, axis2=-1))
    return traces


def cycle_values(matrices: np.ndarray, lam: CycleType) -> np.ndarray:
    """∏ Tr_N(B^{m_i}) for each sample."""
    N = matrices.shape[-1]
    traces = _trace_powers(matrices, max(lam.parts))
    values = np.ones(len(matrices), dtype=complex)
    for m in lam.parts:
        values *= traces[m] / N
    return values


def summarize(values: np.ndarray) -> SimResult:
    """Mean and standard error; the spread is taken over |v - mean| so a noisy
    imaginary part widens the error bar."""
    count = len(values)
    mean = complex(values.mean())
    if count > 1:
        spread = math.sqrt(float(np.sum(np.abs(values - mean) ** 2)) / (count - 1))
        stderr = spread / math.sqrt(count)
    else:
        stderr = 0.0
    return SimResult(mean=mean.real, mean_imag=mean.imag, stderr=stderr, samples=count)


def compare(result: SimResult, exact: float) -> CheckResult:
    if result.stderr > 0:
        sigmas = (result.mean - exact) / result.stderr
    else:
        sigmas = 0.0 if math.isclose(result.mean, exact, rel_tol=1e-12, abs_tol=1e-12) else math.inf
    return CheckResult(**result.model_dump(), exact=exact, sigmas_away=sigmas)


def _pool(cfg: SimConfig, pool: SampleWorkerPool | None) -> SampleWorkerPool:
    return pool or SampleWorkerPool(threads=cfg.threads, chunk_size=cfg.chunk_size)


def moment_samples(
    lam: CycleType,
    cfg: SimConfig,
    *,
    pool: SampleWorkerPool | None = None,
    conjugate_by: np.ndarray | None = None,
) -> np.ndarray:
    def job(rng: np.random.Generator, size: int) -> np.ndarray:
        matrices = _brownian_batch(rng, cfg.N, cfg.steps, cfg.delta, size)
        if conjugate_by is not None:
            matrices = conjugate_by @ matrices @ np.conj(conjugate_by.T)
        return cycle_values(matrices, lam)

    return np.concatenate(_pool(cfg, pool).map_chunks(job, cfg.samples, cfg.seed))


def estimate_moment(
    lam: CycleType, cfg: SimConfig, *, pool: SampleWorkerPool | None = None
) -> SimResult:
    values = moment_samples(lam, cfg, pool=pool)
    if cfg.trace_path:
        write_trace_csv(cfg.trace_path, values)
        LOGGER.debug("Wrote %s sample traces to %s", len(values), cfg.trace_path)
    return summarize(values)


def exact_moment(lam: CycleType, cfg: SimConfig) -> float:
    """The heat-kernel value at the time ``cfg`` actually runs, B_{horizon} = B_{(N·horizon)/N}."""
    return moment_value(lam, cfg.N, cfg.horizon * cfg.N).value


def moment_check(
    lam: CycleType, cfg: SimConfig, *, pool: SampleWorkerPool | None = None
) -> CheckResult:
    return compare(estimate_moment(lam, cfg, pool=pool), exact_moment(lam, cfg))


def martingale_check(
    sigma: Permutation,
    N: int,
    t: float,
    samples: int,
    *,
    seed: int = 0,
    steps: int = 100,
    pool: SampleWorkerPool | None = None,
) -> CheckResult:
    """E[p^{st}_{π_t}(B_t)] against e^{-(Nn+n(n-1))t/2} N^{ℓ(σ)}.

    π is the transposition walk from σ with rate binom(n, 2), B an independent
    Brownian motion run for the raw time t.
    """
    n = sigma.n
    cfg = SimConfig(N=N, t=t, steps=steps, samples=samples, seed=seed, raw_time=True)
    pairs = transposition_pairs(n)
    rate = comb(n, 2) * t

    def job(rng: np.random.Generator, size: int) -> np.ndarray:
        traces = _trace_powers(_brownian_batch(rng, N, cfg.steps, cfg.delta, size), n)
        jumps = rng.poisson(rate, size) if rate > 0 else np.zeros(size, dtype=int)
        moves = rng.integers(len(pairs), size=int(jumps.sum())) if pairs else np.zeros(0, dtype=int)
        values = np.empty(size, dtype=complex)
        cursor = 0
        for s in range(size):
            images = list(sigma.images)
            for move in moves[cursor : cursor + jumps[s]]:
                i, j = pairs[move]
                images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
            cursor += jumps[s]
            value = complex(1)
            for m in Permutation(tuple(images)).cycle_type().parts:
                value *= traces[m][s]
            values[s] = value
        return values

    values = np.concatenate(_pool(cfg, pool).map_chunks(job, samples, seed))
    exact = math.exp(-(N * n + n * (n - 1)) * t / 2) * N**sigma.cycle_count
    return compare(summarize(values), exact)


def variance_slope(
    lam: CycleType,
    Ns: list[int],
    t: float,
    cfg: SimConfig,
    *,
    pool: SampleWorkerPool | None = None,
) -> float:
    """Slope of log Var[Re p_σ(B_{t/N})] against log N."""
    if len(Ns) < 2:
        raise ValueError("a slope needs at least two values of N")
    variances = []
    for N in Ns:
        result = estimate_moment(lam, cfg.model_copy(update={"N": N, "t": t, "trace_path": None}), pool=pool)
        variances.append(result.stderr**2 * result.samples)
        LOGGER.debug("variance_slope %s N=%s var=%s", lam, N, variances[-1])
    if min(variances) <= 0:
        raise ValueError(f"degenerate variances {variances}; is t > 0?")
    slope, _ = np.polyfit(np.log(Ns), np.log(variances), 1)
    return float(slope)


def conjugation_check(
    lam: CycleType,
    cfg: SimConfig,
    *,
    unitary: np.ndarray | None = None,
    pool: SampleWorkerPool | None = None,
) -> CheckResult:
    """Estimate from samples conjugated by a fixed unitary, against the exact value."""
    if unitary is None:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=_CONJUGATION_KEY))
        unitary = haar_unitary(rng, cfg.N)
    values = moment_samples(lam, cfg, pool=pool, conjugate_by=unitary)
    return compare(summarize(values), exact_moment(lam, cfg))


def weak_order_check(
    lam: CycleType, cfg: SimConfig, *, pool: SampleWorkerPool | None = None
) -> CheckResult:
    """Halve δ and compare; ``exact`` holds the coarse mean, ``stderr`` the combined error."""
    coarse = estimate_moment(lam, cfg.model_copy(update={"trace_path": None}), pool=pool)
    fine = estimate_moment(
        lam, cfg.model_copy(update={"steps": 2 * cfg.steps, "trace_path": None}), pool=pool
    )
    combined = SimResult(
        mean=fine.mean,
        mean_imag=fine.mean_imag,
        stderr=math.hypot(coarse.stderr, fine.stderr),
        samples=fine.samples,
    )
    return compare(combined, coarse.mean)
