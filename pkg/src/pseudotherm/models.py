"""Model Hamiltonians: the 2x2 pseudo-Hermitian toy model and a discretized
PT-symmetric cubic oscillator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .pseudoherm import MetricPair, build_metric, intertwining_residual


@dataclass(frozen=True)
class TwoLevelParams:
    """Parameters of ``[[a, epsilon], [-epsilon, b]]``.

    The volume-scaled variant has ``a = n/v**2``, ``b = m/v**2`` and
    ``epsilon = eps_bar/v**2``; see :meth:`from_volume`.
    """

    a: float
    b: float
    epsilon: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a and b must differ")

    @classmethod
    def from_volume(cls, n: float, m: float, eps_bar: float, v: float) -> "TwoLevelParams":
        if v <= 0:
            raise ValueError("volume must be positive")
        return cls(n / v**2, m / v**2, eps_bar / v**2)

    @property
    def gap(self) -> float:
        return self.a - self.b

    @property
    def discriminant(self) -> float:
        """``(a - b)**2 - 4 epsilon**2``; positive iff the spectrum is real."""
        return self.gap**2 - 4 * self.epsilon**2

    @property
    def real_spectrum(self) -> bool:
        return abs(self.epsilon) < abs(self.gap) / 2

    def require_real(self) -> None:
        if not self.real_spectrum:
            raise ValueError(
                f"|epsilon| = {abs(self.epsilon)} violates the reality condition "
                f"|epsilon| < |a - b|/2 = {abs(self.gap) / 2}"
            )

    def energies(self) -> tuple[complex, complex]:
        """``E_j = (a + b + (-1)**j sqrt((a-b)**2 - 4 eps**2)) / 2`` for j = 1, 2."""
        d = np.sqrt(complex(self.discriminant))
        mid = (self.a + self.b) / 2
        return mid - d / 2, mid + d / 2


def two_level(p: TwoLevelParams) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H, eta)`` with ``eta = diag(1, -1)``."""
    H = np.array([[p.a, p.epsilon], [-p.epsilon, p.b]], dtype=np.complex128)
    eta = np.diag([1.0, -1.0]).astype(np.complex128)
    return H, eta


def two_level_closed_form_B(p: TwoLevelParams) -> np.ndarray:
    """Closed-form map ``B`` for the toy model, entries taken verbatim.

    Kept as reference data only; :func:`validate_closed_form_B` reports how well
    it works. As ``epsilon -> 0`` it tends to a singular matrix:
    ``[[0, 1], [0, 0]]`` for ``a > b`` and ``[[0, 0], [0, 1]]`` for ``a < b``.
    """
    p.require_real()
    a, b, e = p.a, p.b, p.epsilon
    d = np.sqrt(p.discriminant)
    return np.array(
        [
            [e / d, 2 * e**2 / (4 * e**2 + (a - b) * (b - a + d))],
            [-e / d, -4 * e**2 / (-4 * e**2 + (a - b + d) ** 2)],
        ],
        dtype=np.complex128,
    )


@dataclass(frozen=True)
class ClosedFormBReport:
    condition_number: float
    hermitian_residual: float
    intertwining_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            np.isfinite(self.condition_number)
            and self.condition_number < linalg.CONDITION_CAP
            and self.hermitian_residual < self.tol
            and self.intertwining_residual < self.tol
        )


def validate_closed_form_B(p: TwoLevelParams, tol: float = 1e-9) -> ClosedFormBReport:
    """Check the closed-form ``B`` against the metric relations.

    Reports the hermiticity residual of ``B H B^-1`` and the intertwining
    residual of ``B^dagger B``. A failure is reported, never raised.
    """
    H, _ = two_level(p)
    try:
        B = two_level_closed_form_B(p)
    except (ValueError, ZeroDivisionError, FloatingPointError):
        return ClosedFormBReport(np.inf, np.inf, np.inf, tol)
    with np.errstate(all="ignore"):
        if not np.all(np.isfinite(B)):
            return ClosedFormBReport(np.inf, np.inf, np.inf, tol)
        cond = float(np.linalg.cond(B))
        if not np.isfinite(cond) or cond > 1e15:
            return ClosedFormBReport(cond, np.inf, np.inf, tol)
        h = B @ H @ np.linalg.inv(B)
        herm = linalg.hermiticity_residual(h)
        inter = intertwining_residual(H, B.conj().T @ B)
    return ClosedFormBReport(cond, herm, inter, tol)


def two_level_metric(p: TwoLevelParams) -> MetricPair:
    """Metric for the toy model; always from :func:`build_metric`."""
    p.require_real()
    H, _ = two_level(p)
    return build_metric(H)


# ---------------------------------------------------------------------------
# cubic oscillator


@dataclass(frozen=True)
class GridHamiltonian:
    grid_points: int
    half_width: float
    x: np.ndarray
    matrix: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def pt_residual(self) -> float:
        """Max deviation from invariance under index reversal + conjugation."""
        M = self.matrix
        return float(np.max(np.abs(M[::-1, ::-1].conj() - M)))

    def low_lying(self, k: int) -> np.ndarray:
        """The `k` eigenvalues of smallest real part, sorted by real part."""
        w = np.linalg.eigvals(self.matrix)
        return w[np.argsort(w.real)][:k]


def _cubic(x):
    # explicit product: x**3 is not exactly odd in the last ulp
    return 1j * (x * x * x)


def _harmonic(x):
    return x * x


POTENTIALS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "cubic": _cubic,
    "harmonic": _harmonic,
}


def cubic_oscillator(grid_points: int, L: float, potential="cubic") -> GridHamiltonian:
    """Finite-difference ``-d^2/dx^2 + V(x)`` on ``[-L, L]`` with Dirichlet ends.

    `grid_points` interior nodes are placed symmetrically, so index reversal
    is the parity ``x -> -x``. `potential` is ``"cubic"`` (``i x^3``),
    ``"harmonic"`` (``x^2``) or a callable.
    """
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    if L <= 0:
        raise ValueError("L must be positive")
    V = POTENTIALS[potential] if isinstance(potential, str) else potential
    h = 2 * L / (grid_points + 1)
    x = -L + h * np.arange(1, grid_points + 1)
    # antisymmetric rounding of the nodes keeps the PT invariance exact
    x = (x - x[::-1]) / 2
    kinetic = (
        np.diag(np.full(grid_points, 2.0))
        - np.diag(np.ones(grid_points - 1), 1)
        - np.diag(np.ones(grid_points - 1), -1)
    ) / h**2
    matrix = kinetic.astype(np.complex128) + np.diag(np.asarray(V(x), dtype=np.complex128))
    return GridHamiltonian(grid_points, float(L), x, matrix)
