"""Exponential polynomials ``sum c * t**m * exp(1j * omega * t)``.

Closed under addition, multiplication and integration from 0, which is
all the interaction-picture Dyson iteration needs. Frequencies closer than
``RESONANCE_TOL`` are merged, and those that small are treated as exactly
resonant (zero).
"""

from __future__ import annotations

from math import factorial

import numpy as np

RESONANCE_TOL = 1e-12


def _snap(omega: float) -> float:
    return 0.0 if abs(omega) < RESONANCE_TOL else float(omega)


class ExpPoly:
    """Immutable map ``(power, frequency) -> coefficient``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, float], complex] | None = None):
        self.terms = _canonical(terms or {})

    @classmethod
    def constant(cls, c: complex) -> "ExpPoly":
        return cls({(0, 0.0): complex(c)}) if c != 0 else cls()

    @classmethod
    def oscillation(cls, c: complex, omega: float) -> "ExpPoly":
        return cls({(0, _snap(omega)): complex(c)}) if c != 0 else cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*t^{m}*e^(i*{w:.6g}*t)" for (m, w), c in self.terms.items())
        return f"ExpPoly({body or '0'})"

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return ExpPoly(out)

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            c = complex(other)
            return ExpPoly({k: v * c for k, v in self.terms.items()}) if c != 0 else ExpPoly()
        out: dict[tuple[int, float], complex] = {}
        for (m1, w1), c1 in self.terms.items():
            for (m2, w2), c2 in other.terms.items():
                key = (m1 + m2, _snap(w1 + w2))
                out[key] = out.get(key, 0) + c1 * c2
        return ExpPoly(out)

    __rmul__ = __mul__

    def integrate(self) -> "ExpPoly":
        """Exact antiderivative vanishing at ``t = 0``."""
        out: dict[tuple[int, float], complex] = {}

        def put(key, c):
            out[key] = out.get(key, 0) + c

        for (m, w), c in self.terms.items():
            if w == 0.0:
                put((m + 1, 0.0), c / (m + 1))
                continue
            kappa = 1j * w
            # int_0^t s^m e^{k s} ds
            #   = e^{k t} sum_j (-1)^j m!/(m-j)! t^(m-j) / k^(j+1)  -  (-1)^m m! / k^(m+1)
            for j in range(m + 1):
                coef = (-1) ** j * factorial(m) / factorial(m - j) / kappa ** (j + 1)
                put((m - j, w), c * coef)
            put((0, 0.0), -c * (-1) ** m * factorial(m) / kappa ** (m + 1))
        return ExpPoly(out)

    def __call__(self, t: complex) -> complex:
        t = complex(t)
        return sum(
            (c * t**m * np.exp(1j * w * t) for (m, w), c in self.terms.items()),
            start=0j,
        )


def _canonical(terms: dict[tuple[int, float], complex]) -> dict[tuple[int, float], complex]:
    by_power: dict[int, list[tuple[float, complex]]] = {}
    for (m, w), c in terms.items():
        by_power.setdefault(m, []).append((_snap(w), c))
    out: dict[tuple[int, float], complex] = {}
    for m, items in by_power.items():
        items.sort(key=lambda x: x[0])
        rep, acc = items[0]
        for w, c in items[1:]:
            if abs(w - rep) <= RESONANCE_TOL * max(1.0, abs(rep)):
                acc += c
            else:
                if acc != 0:
                    out[(m, rep)] = complex(acc)
                rep, acc = w, c
        if acc != 0:
            out[(m, rep)] = complex(acc)
    return out


class ExpPolyMatrix:
    """Square matrix with ExpPoly entries."""

    def __init__(self, entries: list[list[ExpPoly]]):
        self.entries = entries
        self.dim = len(entries)

    @classmethod
    def identity(cls, dim: int) -> "ExpPolyMatrix":
        return cls([[ExpPoly.constant(1.0 if i == j else 0.0) for j in range(dim)] for i in range(dim)])

    def __getitem__(self, idx: tuple[int, int]) -> ExpPoly:
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other: "ExpPolyMatrix") -> "ExpPolyMatrix":
        n = self.dim
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ExpPoly()
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExpPolyMatrix(out)

    def scale(self, c: complex) -> "ExpPolyMatrix":
        return ExpPolyMatrix([[e * c for e in row] for row in self.entries])

    def integrate(self) -> "ExpPolyMatrix":
        return ExpPolyMatrix([[e.integrate() for e in row] for row in self.entries])

    def __call__(self, t: complex) -> np.ndarray:
        return np.array([[e(t) for e in row] for row in self.entries], dtype=np.complex128)
