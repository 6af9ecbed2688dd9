"""Thermodynamics of an ensemble of N independent subsystems.

``Z = Z_s**N``, ``F = -(N/beta) ln Z_s``, ``S = -dF/dT``,
``U = d(beta F)/d beta``, ``c_v = (1/N) dU/dT`` and ``P = -dF/dv``
(``T = 1/beta``, ``k_B = 1``). Closed forms are provided for the toy
model's second-order partition function; :func:`thermo_point_numeric`
differentiates any partition-function callable numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import TwoLevelParams

# natural log for F; base 10 for the log-error curves
LOG_BASE = math.e
DELTA_LOG_BASE = 10.0


@dataclass(frozen=True)
class ThermoPoint:
    beta: float
    n_particles: int
    z_s: float
    free_energy: float
    entropy: float
    internal_energy: float
    specific_heat: float
    volume: float | None = None
    pressure: float | None = None

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    def euler_residual(self) -> float:
        """Relative gap in ``F = U - S/beta``."""
        rhs = self.internal_energy - self.entropy / self.beta
        scale = max(abs(self.free_energy), abs(self.internal_energy), abs(self.entropy / self.beta))
        return abs(self.free_energy - rhs) / scale if scale > 0 else abs(self.free_energy - rhs)


def _check_ensemble(beta: float, N: int) -> None:
    if beta <= 0:
        raise ValueError("beta must be positive")
    if N < 1:
        raise ValueError("N must be at least 1")


def free_energy(z_s: float, beta: float, N: int = 1, base: float = LOG_BASE) -> float:
    """``-(N/beta) log z_s``; `base` other than e is for comparison only,
    the closed forms and derivatives assume the natural log."""
    _check_ensemble(beta, N)
    if not z_s > 0:
        raise ValueError(f"partition function must be positive, got {z_s}")
    return -N / beta * math.log(z_s) / math.log(base)


# ---------------------------------------------------------------------------
# numeric differentiation

# five-point central stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


def _derivatives(f: Callable[[float], float], x: float, h: float) -> tuple[float, float]:
    vals = np.array([f(x + k * h) for k in _OFFSETS])
    return float(_D1 @ vals / h), float(_D2 @ vals / h**2)


def thermo_point_numeric(
    Z: Callable[[float], float],
    beta: float,
    N: int = 1,
    v: float | None = None,
    Zv: Callable[[float, float], float] | None = None,
    h: float | None = None,
) -> ThermoPoint:
    """All thermodynamic quantities by central differences of F.

    Parameters
    ----------
    Z : callable
        Subsystem partition function ``beta -> Z_s``.
    beta : float
        Inverse temperature.
    N : int
        Number of particles.
    v, Zv : optional
        Volume and ``(beta, v) -> Z_s``; when both are given the pressure
        ``-dF/dv`` is computed as well.
    h : float, optional
        Step in beta; defaults to ``3e-3 * beta``, which balances the
        truncation and rounding errors of the second derivative. The
        volume step is ``1e-3 * v``.
    """
    _check_ensemble(beta, N)
    h = 3e-3 * beta if h is None else h
    if beta - 2 * h <= 0:
        raise ValueError("step too large for beta")

    def F(b):
        return free_energy(Z(b), b, N)

    f0 = F(beta)
    dF, _ = _derivatives(F, beta, h)
    dbF, d2bF = _derivatives(lambda b: b * F(b), beta, h)
    entropy = beta**2 * dF            # -dF/dT with dT = -dbeta/beta^2
    internal = dbF
    specific_heat = -(beta**2) / N * d2bF

    pressure = None
    if v is not None and Zv is not None:
        if v <= 0:
            raise ValueError("volume must be positive")
        dFv, _ = _derivatives(lambda x: free_energy(Zv(beta, x), beta, N), v, 1e-3 * v)
        pressure = -dFv

    return ThermoPoint(
        beta=beta,
        n_particles=N,
        z_s=Z(beta),
        free_energy=f0,
        entropy=entropy,
        internal_energy=internal,
        specific_heat=specific_heat,
        volume=v,
        pressure=pressure,
    )


# ---------------------------------------------------------------------------
# toy-model closed forms


def _weights(p: TwoLevelParams, beta: float) -> tuple[float, float, float]:
    """``exp(-a beta + s)``, ``exp(-b beta + s)`` and the shift ``s``."""
    s = beta * min(p.a, p.b)
    return math.exp(-beta * p.a + s), math.exp(-beta * p.b + s), s


def z_s_exact(p: TwoLevelParams, beta: float) -> float:
    """``exp(-beta E_1) + exp(-beta E_2)``; needs a real spectrum."""
    p.require_real()
    e1, e2 = p.energies()
    return math.exp(-beta * e1.real) + math.exp(-beta * e2.real)


def z_s_perturbative(p: TwoLevelParams, beta: float) -> float:
    """Second-order partition function
    ``e^{-a beta} + e^{-b beta} + eps^2 beta (e^{-a beta} - e^{-b beta}) / (a - b)``."""
    wa, wb, s = _weights(p, beta)
    c = p.epsilon**2 * beta / p.gap
    return math.exp(-s) * (wa * (1 + c) + wb * (1 - c))


def _log_z_s(p: TwoLevelParams, beta: float) -> float:
    wa, wb, s = _weights(p, beta)
    c = p.epsilon**2 * beta / p.gap
    inner = wa * (1 + c) + wb * (1 - c)
    if not inner > 0:
        raise ValueError("second-order partition function is not positive here")
    return -s + math.log(inner)


def _check_toy(p: TwoLevelParams, beta: float, N: int) -> None:
    _check_ensemble(beta, N)
    p.require_real()


def two_level_free_energy(p: TwoLevelParams, beta: float, N: int = 1) -> float:
    _check_toy(p, beta, N)
    return -N / beta * _log_z_s(p, beta)


def _energy_ratio(p: TwoLevelParams, beta: float) -> float:
    # numerator and denominator both carry e^{a beta}, e^{b beta}; rescale by
    # e^{-beta max(a, b)} to stay finite at low temperature
    a, b, e2 = p.a, p.b, p.epsilon**2
    top = beta * max(a, b)
    ea, eb = math.exp(beta * a - top), math.exp(beta * b - top)
    num = eb * (a * (a - b + e2 * beta) - e2) + ea * (b * (a - b - e2 * beta) + e2)
    den = ea * (a - b - e2 * beta) + eb * (a - b + e2 * beta)
    return num / den


def two_level_internal_energy(p: TwoLevelParams, beta: float, N: int = 1) -> float:
    """Closed-form ``U = d(beta F)/d beta`` of the second-order model."""
    _check_toy(p, beta, N)
    return N * _energy_ratio(p, beta)


def two_level_entropy(p: TwoLevelParams, beta: float, N: int = 1) -> float:
    """Closed-form ``S = N ln Z_s + beta U``."""
    _check_toy(p, beta, N)
    return N * _log_z_s(p, beta) + N * beta * _energy_ratio(p, beta)


def two_level_specific_heat(p: TwoLevelParams, beta: float) -> float:
    """Closed-form specific heat per particle of the second-order model."""
    _check_toy(p, beta, 1)
    a, b = p.a, p.b
    e2 = p.epsilon**2
    e4 = e2 * e2
    g = a - b
    top = beta * max(a, b)
    ea, eb = math.exp(beta * a - top), math.exp(beta * b - top)
    num = ea * eb * (g**2 * (g**2 - 4 * e2 - e4 * beta**2) + 2 * e4) - e4 * (ea**2 + eb**2)
    den = ea * (g - e2 * beta) + eb * (g + e2 * beta)
    return beta**2 * num / den**2


def two_level_pressure(n: float, m: float, eps_bar: float, v: float, beta: float, N: int = 1) -> float:
    """``P = -dF/dv`` with ``a = n/v^2``, ``b = m/v^2``, ``eps = eps_bar/v^2``.

    Chain rule through the level parameters: each scales as ``v**-2`` so
    ``dx/dv = -2x/v`` and ``P = (2/v) sum_x x dF/dx``.
    """
    _check_ensemble(beta, N)
    p = TwoLevelParams.from_volume(n, m, eps_bar, v)
    p.require_real()
    a, b, e = p.a, p.b, p.epsilon
    g = a - b
    wa, wb, _ = _weights(p, beta)          # common factor e^{-s} cancels below
    z = wa + wb + e**2 * beta * (wa - wb) / g
    dz_da = -beta * wa + e**2 * beta * (-beta * wa / g - (wa - wb) / g**2)
    dz_db = -beta * wb + e**2 * beta * (beta * wb / g + (wa - wb) / g**2)
    dz_de = 2 * e * beta * (wa - wb) / g
    # dF/dx = -(N/beta) (dz/dx)/z
    virial = a * dz_da + b * dz_db + e * dz_de
    return -2.0 * N / (v * beta) * virial / z


equation_of_state = two_level_pressure


def reference_pressure(n: float, m: float, eps_bar: float, v: float, beta: float, N: int = 1) -> float:
    """Expanded rational form of the equation of state.

    Algebraically equal to :func:`two_level_pressure`; kept as an
    independent cross-check rather than as the implementation.
    """
    e2 = eps_bar**2
    v2 = v * v
    top = beta * max(n, m) / v2
    en, em = math.exp(beta * n / v2 - top), math.exp(beta * m / v2 - top)
    num = en * (m * (v2 * (n - m) - beta * e2) + v2 * e2) + em * (n * (v2 * (n - m) + beta * e2) - v2 * e2)
    den = v**3 * (en * (v2 * (n - m) - beta * e2) + em * (v2 * (n - m) + beta * e2))
    return 2 * N * num / den


def two_level_thermo_point(
    p: TwoLevelParams, beta: float, N: int = 1, volume: tuple[float, float, float, float] | None = None
) -> ThermoPoint:
    """Closed-form ThermoPoint; `volume` is ``(n, m, eps_bar, v)`` for the pressure."""
    pressure = None
    v = None
    if volume is not None:
        n, m, eps_bar, v = volume
        pressure = two_level_pressure(n, m, eps_bar, v, beta, N)
    return ThermoPoint(
        beta=beta,
        n_particles=N,
        z_s=z_s_perturbative(p, beta),
        free_energy=two_level_free_energy(p, beta, N),
        entropy=two_level_entropy(p, beta, N),
        internal_energy=two_level_internal_energy(p, beta, N),
        specific_heat=two_level_specific_heat(p, beta),
        volume=v,
        pressure=pressure,
    )


def log_relative_error(z: float, z_ref: float, base: float = DELTA_LOG_BASE) -> float:
    """``log_base |(z - z_ref)/z_ref|``; ``-inf`` when they coincide."""
    gap = abs((z - z_ref) / z_ref)
    return -math.inf if gap == 0 else math.log10(gap) / math.log10(base)


# ---------------------------------------------------------------------------
# temperature scans


def temperature_grid(t_min: float = 0.01, t_max: float = 5.0, count: int = 500) -> np.ndarray:
    return np.linspace(t_min, t_max, count)


@dataclass(frozen=True)
class HeatPeak:
    temperature: float
    height: float
    interior_maxima: int


def specific_heat_peak(p: TwoLevelParams, temperatures: np.ndarray) -> HeatPeak:
    """Locate the Schottky maximum: coarse scan over `temperatures`, then Brent refinement."""
    from scipy.optimize import minimize_scalar

    cv = np.array([two_level_specific_heat(p, 1.0 / t) for t in temperatures])
    interior = [
        i for i in range(1, len(cv) - 1) if cv[i] > cv[i - 1] and cv[i] >= cv[i + 1]
    ]
    i = int(np.argmax(cv))
    lo = temperatures[max(i - 1, 0)]
    hi = temperatures[min(i + 1, len(temperatures) - 1)]
    res = minimize_scalar(
        lambda t: -two_level_specific_heat(p, 1.0 / t),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return HeatPeak(float(res.x), float(-res.fun), len(interior))
