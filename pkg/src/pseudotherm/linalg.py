"""Dense complex linear algebra kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
helpers here validate shape and finiteness and raise on the failure modes
the rest of the package relies on (singular, defective, indefinite input).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# default tolerances, overridable per call
RECONSTRUCTION_TOL = 1e-9
HERMITIAN_TOL = 1e-12
CONDITION_CAP = 1e12


class SingularMatrixError(np.linalg.LinAlgError):
    """Matrix is singular or too ill-conditioned to invert."""


class DefectiveMatrixError(np.linalg.LinAlgError):
    """Eigen-decomposition failed to reconstruct the input."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Matrix is not Hermitian positive definite."""


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return `A` as a square, finite complex128 array, or raise ValueError."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _check_same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")


def matmul(A, B) -> np.ndarray:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _check_same_dim(A, B)
    return A @ B


def adjoint(A) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(A).conj().T


def trace(A) -> complex:
    return complex(np.trace(as_matrix(A)))


def norm(A) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(A))


def relative_residual(X, Y, scale: float | None = None) -> float:
    """``||X - Y|| / scale`` with ``scale`` defaulting to ``||Y||`` (or 1 if zero)."""
    if scale is None:
        scale = norm(Y)
    diff = norm(np.asarray(X) - np.asarray(Y))
    return diff / scale if scale > 0 else diff


def hermiticity_residual(A) -> float:
    """``||A - A^dagger|| / ||A||``; zero for Hermitian input."""
    A = np.asarray(A)
    return relative_residual(A, A.conj().T, scale=norm(A))


def is_hermitian(A, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_residual(A) <= tol


# ---------------------------------------------------------------------------
# matrix exponential

# degree-13 diagonal Pade coefficients and the 1-norm bound below which a
# single evaluation reaches double precision (Higham 2005)
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def _pade13(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _PADE13
    ident = np.eye(A.shape[0], dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (c[13] * A6 + c[11] * A4 + c[9] * A2)
             + c[7] * A6 + c[5] * A4 + c[3] * A2 + c[1] * ident)
    V = (A6 @ (c[12] * A6 + c[10] * A4 + c[8] * A2)
         + c[6] * A6 + c[4] * A4 + c[2] * A2 + c[0] * ident)
    return U, V


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade core.

    Raises
    ------
    OverflowError
        If the result is not representable in double precision.
    """
    A = as_matrix(A)
    norm1 = np.linalg.norm(A, 1)
    if norm1 == 0.0:
        return np.eye(A.shape[0], dtype=np.complex128)
    squarings = max(0, int(np.ceil(np.log2(norm1 / _THETA13))))
    As = A / 2.0**squarings
    U, V = _pade13(As)
    R = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise OverflowError(f"matrix exponential overflows (1-norm of argument {norm1:.3g})")
    return R


# ---------------------------------------------------------------------------
# eigen-decomposition


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues with biorthonormal right/left eigenvector sets.

    Columns of ``right_vectors`` satisfy ``A r = lambda r``; columns of
    ``left_vectors`` satisfy ``l^dagger A = lambda l^dagger`` and
    ``left_vectors^dagger @ right_vectors = I``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return (self.right_vectors * self.eigenvalues) @ self.left_vectors.conj().T

    def biorthonormality_residual(self) -> float:
        gram = self.left_vectors.conj().T @ self.right_vectors
        return norm(gram - np.eye(self.dim))


def eig(A, tol: float = RECONSTRUCTION_TOL) -> EigenSystem:
    """Eigen-decomposition of a diagonalizable matrix.

    Hermitian input goes through ``eigh`` so the eigenvalues are exactly
    real and the vectors orthonormal. Otherwise LAPACK's Hessenberg/QR
    solver supplies the right vectors and the left vectors are taken from
    the inverse of the right-vector matrix.

    Raises
    ------
    DefectiveMatrixError
        If ``||R diag(lambda) R^-1 - A|| / ||A||`` or the biorthonormality
        residual ``||L^dagger R - 1||`` exceeds `tol`.
    """
    A = as_matrix(A)
    if is_hermitian(A, 1e-14):
        w, R = np.linalg.eigh((A + A.conj().T) / 2)
        return EigenSystem(w.astype(np.complex128), R, R)

    w, R = np.linalg.eig(A)
    try:
        Rinv = np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrixError("eigenvector matrix is singular") from exc
    system = EigenSystem(w, R, Rinv.conj().T)
    residual = max(relative_residual(system.reconstruct(), A), system.biorthonormality_residual())
    if not np.isfinite(residual) or residual > tol:
        raise DefectiveMatrixError(
            f"matrix is numerically defective (residual {residual:.2e})"
        )
    return system


def eigvals(A) -> np.ndarray:
    return eig(A).eigenvalues


# ---------------------------------------------------------------------------
# factorizations


def cholesky_factor(theta, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``B`` (upper triangular) with ``theta = B^dagger B``.

    Raises
    ------
    NotPositiveDefiniteError
        For non-Hermitian input or a non-positive pivot.
    """
    theta = as_matrix(theta, "theta")
    herm = hermiticity_residual(theta)
    if herm > tol:
        raise NotPositiveDefiniteError(f"theta is not Hermitian (residual {herm:.2e})")
    try:
        lower = np.linalg.cholesky((theta + theta.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("theta is not positive definite") from exc
    return lower.conj().T


def inverse(A, cond_cap: float = CONDITION_CAP) -> np.ndarray:
    """Inverse of a well-conditioned matrix.

    Raises
    ------
    SingularMatrixError
        If the 2-norm condition number exceeds `cond_cap`.
    """
    A = as_matrix(A)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularMatrixError(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
    return np.linalg.inv(A)
