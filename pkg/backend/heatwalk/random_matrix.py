"""Random matrices used by the simulators and the sampled operator checks."""

from __future__ import annotations

import numpy as np


def gaussian_u_algebra(rng: np.random.Generator, size: int, batch: int = 1) -> np.ndarray:
    """Standard Gaussians in u(N) for the inner product ⟨X, Y⟩ = -Tr(XY).

    Diagonal entries are i·g; each off-diagonal pair is G_jk = (x+iy)/√2,
    G_kj = (-x+iy)/√2. Shape ``(batch, size, size)``.
    """
    diag = rng.standard_normal((batch, size))
    x = rng.standard_normal((batch, size, size)) / np.sqrt(2)
    y = rng.standard_normal((batch, size, size)) / np.sqrt(2)
    upper = np.triu(x + 1j * y, k=1)
    g = upper - np.conj(np.swapaxes(upper, -1, -2))
    idx = np.arange(size)
    g[:, idx, idx] = 1j * diag
    return g


def haar_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    a = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / np.sqrt(2)
    q, r = np.linalg.qr(a)
    # fix the phases so that the decomposition, and hence the law, is unique
    d = np.diagonal(r)
    q *= d / np.abs(d)
    return q
