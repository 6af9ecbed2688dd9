"""Equilibrium density matrices and partition functions.

``rho(beta) = exp(-beta H)`` solves the Bloch equation ``d rho / d beta =
-H rho`` with ``rho(0) = 1``; its trace is the partition function. Besides
the exact routes (spectral sum, trace of the exponential) the partition
function can be built from the interaction-picture Dyson series of the
real-time propagator continued to ``t = -i beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exppoly import ExpPoly, ExpPolyMatrix
from .linalg import as_matrix
from .pseudoherm import PAIRING_TOL, SpectrumError, classify_spectrum


@dataclass(frozen=True)
class DensityMatrix:
    """Unnormalized equilibrium density matrix at inverse temperature `beta`."""

    beta: float
    matrix: np.ndarray

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def partition_function(self) -> float:
        return self.trace.real


def density_matrix(H, beta: float) -> DensityMatrix:
    H = as_matrix(H, "H")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return DensityMatrix(float(beta), linalg.expm(-beta * H))


def propagator(H, t: complex) -> np.ndarray:
    """``exp(-i t H)``; at ``t = -i beta`` this is the density matrix."""
    H = as_matrix(H, "H")
    return linalg.expm(-1j * t * H)


def bloch_residual(H, beta: float, h: float = 1e-4) -> float:
    """Norm of the central-difference estimate of ``d rho/d beta + H rho``."""
    H = as_matrix(H, "H")
    rho = density_matrix(H, beta).matrix
    d_rho = (density_matrix(H, beta + h).matrix - density_matrix(H, beta - h).matrix) / (2 * h)
    return float(np.linalg.norm(d_rho + H @ rho))


def partition_trace(H, beta: float) -> float:
    """``Tr exp(-beta H)`` by the matrix exponential."""
    return density_matrix(H, beta).partition_function


def partition_exact(H, beta: float, levels: int | None = None, tol: float = PAIRING_TOL) -> float:
    """Spectral partition function ``sum_n exp(-beta E_n)``.

    Parameters
    ----------
    H : array_like
        Diagonalizable matrix with real spectrum.
    beta : float
        Inverse temperature, ``>= 0``.
    levels : int, optional
        Sum only the `levels` eigenvalues of lowest real part. Only those
        need to be real, so truncated spectra of discretized operators
        (whose upper part is unreliable) are accepted.
    tol : float
        Reality tolerance relative to ``max(1, |E|)``.

    Raises
    ------
    SpectrumError
        If a summed eigenvalue is not real.
    """
    H = as_matrix(H, "H")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if levels is None:
        spectrum = classify_spectrum(H, tol)
        if not spectrum.all_real:
            raise SpectrumError("complex spectrum: partition function is not real")
        energies = spectrum.eigenvalues.real
    else:
        w = np.linalg.eigvals(H)
        w = w[np.argsort(w.real)][:levels]
        if np.any(np.abs(w.imag) >= tol * np.maximum(1.0, np.abs(w))):
            raise SpectrumError("requested levels are not real within tolerance")
        energies = w.real
    shift = energies.min()
    return float(np.exp(-beta * shift) * np.sum(np.exp(-beta * (energies - shift))))


def observable_mean(A, rho: DensityMatrix) -> complex:
    """Normalized thermal mean ``Tr(A rho) / Tr(rho)``."""
    A = as_matrix(A, "A")
    if A.shape != rho.matrix.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {rho.matrix.shape}")
    z = rho.trace
    if z == 0:
        raise ZeroDivisionError("density matrix has zero trace")
    return complex(np.trace(A @ rho.matrix)) / z


def picture_invariance_check(h, b, beta: float) -> tuple[float, float]:
    """Partition function of `h` and of its similarity transform ``b^-1 h b``."""
    h = as_matrix(h, "h")
    b = as_matrix(b, "b")
    h_tilde = linalg.inverse(b) @ h @ b
    return partition_trace(h, beta), partition_trace(h_tilde, beta)


# ---------------------------------------------------------------------------
# Dyson series


@dataclass(frozen=True)
class DysonExpansion:
    """Interaction-picture propagator truncated at order `order` in `epsilon`.

    ``terms[k]`` holds the k-th order contribution to ``U_I(t)``, including
    its ``(-i epsilon)**k`` prefactor, as a matrix of exponential
    polynomials in ``t``. ``energies`` is the diagonal of ``h0``.
    """

    order: int
    h0: np.ndarray
    v: np.ndarray
    epsilon: float
    terms: tuple[ExpPolyMatrix, ...]

    @property
    def energies(self) -> np.ndarray:
        return np.real(np.diag(self.h0))

    def interaction_propagator(self, t: complex, order: int | None = None) -> np.ndarray:
        """``U_I(t)`` summed through `order` (default: all stored terms)."""
        upto = self.order if order is None else order
        return sum((self.terms[k](t) for k in range(upto + 1)), start=np.zeros_like(self.h0))

    def propagator(self, t: complex, order: int | None = None) -> np.ndarray:
        """``U(t) = U_0(t) U_I(t)``."""
        u0 = np.exp(-1j * self.energies * complex(t))
        return u0[:, None] * self.interaction_propagator(t, order)


def dyson_expand(h0, v, epsilon: float, order: int) -> DysonExpansion:
    """Build the Dyson series of ``U_I`` for ``H = h0 + epsilon v`` in closed form.

    `h0` must be real diagonal. With ``V_I(t)_jk = v_jk exp(i (E_j - E_k) t)``
    each order is ``T_k(t) = int_0^t V_I(s) T_{k-1}(s) ds`` with ``T_0 = 1``,
    integrated exactly over exponential polynomials.
    """
    h0 = as_matrix(h0, "h0")
    v = as_matrix(v, "v")
    if h0.shape != v.shape:
        raise ValueError(f"dimension mismatch: {h0.shape} vs {v.shape}")
    if order < 0:
        raise ValueError("order must be non-negative")
    diag = np.diag(h0)
    scale = max(1.0, float(np.max(np.abs(diag))))
    if np.linalg.norm(h0 - np.diag(diag)) > 1e-12 * scale:
        raise ValueError("h0 must be diagonal")
    if np.any(np.abs(diag.imag) > 1e-12 * scale):
        raise ValueError("h0 must have real diagonal entries")
    E = diag.real
    n = len(E)

    v_int = ExpPolyMatrix(
        [[ExpPoly.oscillation(v[j, k], E[j] - E[k]) for k in range(n)] for j in range(n)]
    )
    current = ExpPolyMatrix.identity(n)
    terms = [current]
    for k in range(1, order + 1):
        current = (v_int @ current).integrate()
        terms.append(current.scale((-1j * epsilon) ** k))
    return DysonExpansion(
        order=order,
        h0=np.diag(E).astype(np.complex128),
        v=v,
        epsilon=float(epsilon),
        terms=tuple(terms),
    )


def split_hamiltonian(H, epsilon: float | None = None):
    """Rotate `H` into the eigenbasis of its Hermitian part.

    Returns ``(h0, v, epsilon)`` with ``h0`` diagonal and
    ``Q^dagger H Q = h0 + epsilon v`` for the unitary ``Q`` diagonalizing
    ``(H + H^dagger)/2``. When `epsilon` is not given the largest entry
    magnitude of the anti-Hermitian part is used.
    """
    H = as_matrix(H, "H")
    herm = (H + H.conj().T) / 2
    anti = (H - H.conj().T) / 2
    E, Q = np.linalg.eigh(herm)
    w = Q.conj().T @ anti @ Q
    if epsilon is None:
        epsilon = float(np.max(np.abs(w)))
    v = w / epsilon if epsilon != 0 else np.zeros_like(w)
    return np.diag(E).astype(np.complex128), v, float(epsilon)


def dyson_expand_hamiltonian(H, order: int, epsilon: float | None = None) -> DysonExpansion:
    """Dyson expansion of a general `H`, split as Hermitian part + perturbation."""
    h0, v, eps = split_hamiltonian(H, epsilon)
    return dyson_expand(h0, v, eps, order)


def partition_perturbative(expansion: DysonExpansion, beta: float, order: int | None = None) -> float:
    """``Tr(U_0(t) U_I(t))`` at ``t = -i beta``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    u = expansion.propagator(-1j * beta, order)
    return float(np.trace(u).real)
