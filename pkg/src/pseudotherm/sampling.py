"""Seeded random instances for audits and tests."""

from __future__ import annotations

import numpy as np


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (X + X.conj().T) / (2 * np.sqrt(dim))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_invertible(
    rng: np.random.Generator, dim: int, sv_range: tuple[float, float] = (0.5, 2.0)
) -> np.ndarray:
    """Non-unitary invertible matrix with singular values drawn from `sv_range`."""
    s = rng.uniform(*sv_range, size=dim)
    return random_unitary(rng, dim) @ np.diag(s) @ random_unitary(rng, dim).conj().T


def random_quasi_hermitian(rng: np.random.Generator, dim: int):
    """``(H_tilde, h, B)`` with ``H_tilde = B^-1 h B`` and ``h`` Hermitian."""
    h = random_hermitian(rng, dim)
    B = random_invertible(rng, dim)
    return np.linalg.solve(B, h @ B), h, B
