"""Pseudo-hermiticity checks, metric operators and the two-picture map.

A matrix ``H`` is pseudo-Hermitian with respect to a Hermitian invertible
``eta`` when ``H^dagger eta = eta H``. When the spectrum is real there is
a positive-definite choice ``theta = B^dagger B`` (the metric), and
``h = B H B^-1`` is an ordinary Hermitian matrix with the same spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import linalg
from .linalg import as_matrix, norm

PAIRING_TOL = 1e-8
METRIC_TOL = 1e-10


class SpectrumKind(str, Enum):
    ALL_REAL = "AllReal"
    CONJUGATE_PAIRS = "ConjugatePairs"


class SpectrumError(ValueError):
    """Spectrum is incompatible with the requested operation."""


@dataclass(frozen=True)
class SpectrumClass:
    kind: SpectrumKind
    eigenvalues: np.ndarray
    # (i, j) with Im(lambda_i) > 0 and lambda_j ~ conj(lambda_i)
    pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def all_real(self) -> bool:
        return self.kind is SpectrumKind.ALL_REAL


@dataclass(frozen=True)
class MetricPair:
    """Positive-definite metric ``theta`` with a factor ``B``, ``theta = B^dagger B``."""

    theta: np.ndarray
    factor: np.ndarray

    @classmethod
    def from_factor(cls, B) -> "MetricPair":
        B = as_matrix(B, "B")
        return cls(theta=B.conj().T @ B, factor=B)

    @classmethod
    def identity(cls, dim: int) -> "MetricPair":
        eye = np.eye(dim, dtype=np.complex128)
        return cls(eye, eye.copy())

    def hermiticity_residual(self) -> float:
        return linalg.hermiticity_residual(self.theta)

    def min_eigenvalue(self) -> float:
        herm = (self.theta + self.theta.conj().T) / 2
        return float(np.linalg.eigvalsh(herm)[0])

    def factorization_residual(self) -> float:
        B = self.factor
        return linalg.relative_residual(B.conj().T @ B, self.theta)

    def check(self, tol: float = 1e-12) -> None:
        """Raise ValueError unless all three metric invariants hold."""
        if self.hermiticity_residual() > tol:
            raise ValueError("theta is not Hermitian")
        if self.min_eigenvalue() <= 0:
            raise ValueError("theta is not positive definite")
        if self.factorization_residual() > tol:
            raise ValueError("factor does not reproduce theta")


def pseudo_residual(H, eta) -> float:
    """Relative violation of ``H^dagger eta = eta H``.

    Returns ``||H^dagger eta - eta H|| / (||eta|| ||H||)``; zero for
    ``H = 0``.
    """
    H = as_matrix(H, "H")
    eta = as_matrix(eta, "eta")
    if H.shape != eta.shape:
        raise ValueError(f"dimension mismatch: {H.shape} vs {eta.shape}")
    if np.linalg.matrix_rank(eta) < eta.shape[0]:
        raise linalg.SingularMatrixError("eta is singular")
    scale = norm(eta) * norm(H)
    if scale == 0.0:
        return 0.0
    return norm(H.conj().T @ eta - eta @ H) / scale


def classify_spectrum(H, tol: float = PAIRING_TOL) -> SpectrumClass:
    """Decide whether the spectrum of `H` is real or made of conjugate pairs.

    An eigenvalue counts as real when ``|Im| < tol * max(1, spectral radius)``.
    Non-real eigenvalues are matched greedily to their nearest conjugate.

    Raises
    ------
    SpectrumError
        If a non-real eigenvalue has no conjugate partner within tolerance.
    """
    w = linalg.eig(H).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    thresh = tol * scale
    complex_idx = [i for i in range(len(w)) if abs(w[i].imag) >= thresh]
    if not complex_idx:
        return SpectrumClass(SpectrumKind.ALL_REAL, w)

    upper = sorted((i for i in complex_idx if w[i].imag > 0), key=lambda i: -w[i].imag)
    lower = {i for i in complex_idx if w[i].imag < 0}
    pairs = []
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda k: abs(w[k] - np.conj(w[i])))
        if abs(w[j] - np.conj(w[i])) > thresh:
            break
        lower.remove(j)
        pairs.append((i, j))
    if len(pairs) * 2 != len(complex_idx):
        raise SpectrumError(
            "non-real eigenvalues do not form conjugate pairs; "
            "matrix is not pseudo-Hermitian or tolerance is too tight"
        )
    return SpectrumClass(SpectrumKind.CONJUGATE_PAIRS, w, sorted(pairs))


def intertwining_residual(H, theta) -> float:
    """``||H^dagger theta - theta H|| / (||theta|| ||H||)``."""
    H = as_matrix(H, "H")
    theta = as_matrix(theta, "theta")
    scale = norm(theta) * norm(H)
    if scale == 0.0:
        return 0.0
    return norm(H.conj().T @ theta - theta @ H) / scale


def build_metric(H, tol: float = PAIRING_TOL) -> MetricPair:
    """Positive-definite metric for a real-spectrum diagonalizable matrix.

    With ``R`` the (unit-column) right eigenvectors and ``L = (R^-1)^dagger``
    the biorthonormal left vectors, ``theta = L L^dagger``, which maps each
    right eigenvector onto its left partner. For Hermitian input the
    eigenvectors are orthonormal and ``theta`` is the identity.

    Raises
    ------
    SpectrumError
        If the spectrum is not real; no positive metric exists then.
    """
    H = as_matrix(H, "H")
    spectrum = classify_spectrum(H, tol)
    if not spectrum.all_real:
        raise SpectrumError("complex spectrum: no positive-definite metric exists")
    system = linalg.eig(H)
    L = system.left_vectors
    theta = L @ L.conj().T
    theta = (theta + theta.conj().T) / 2
    return MetricPair(theta=theta, factor=linalg.cholesky_factor(theta))


def to_hermitian_picture(H, pair: MetricPair) -> np.ndarray:
    """``h = B H B^-1``; Hermitian when `pair` is a valid metric for `H`."""
    H = as_matrix(H, "H")
    B = pair.factor
    return B @ H @ linalg.inverse(B)


def transform_observable(A, pair: MetricPair) -> np.ndarray:
    """Map a hermitian-picture observable into the quasi-Hermitian picture, ``B^-1 A B``."""
    A = as_matrix(A, "A")
    B = pair.factor
    return linalg.inverse(B) @ A @ B


def from_hermitian_picture(h, B) -> np.ndarray:
    """``B^-1 h B`` for an arbitrary invertible `B`."""
    h = as_matrix(h, "h")
    B = as_matrix(B, "B")
    return linalg.inverse(B) @ h @ B
