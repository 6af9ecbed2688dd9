"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
written straight to the terminal regardless of output capturing.
"""

import csv
import io
import math
import sys
import time

import numpy as np
import pytest

from pseudotherm import bloch, cli, thermo
from pseudotherm.models import TwoLevelParams, cubic_oscillator, two_level
from pseudotherm.pseudoherm import build_metric, intertwining_residual
from pseudotherm.sampling import random_hermitian, random_invertible, random_quasi_hermitian

SEED = 20240101


def report(capsys, number, title, checks, started):
    """Print one summary line and fail with every broken check listed."""
    ok = all(passed for _, passed, _ in checks)
    detail = "; ".join(f"{name}: {info}" for name, _, info in checks)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {title} ({time.perf_counter() - started:.1f}s) | {detail}"
    with capsys.disabled():
        print("\n" + line)
    broken = [f"{name}: {info}" for name, passed, info in checks if not passed]
    assert ok, "; ".join(broken)


def test_criterion_1_picture_invariance(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    count = 0
    for i in range(200):
        dim = 2 + i % 7
        h = random_hermitian(rng, dim)
        B = random_invertible(rng, dim)
        for beta in (0.1, 1.0, 5.0):
            z, z_tilde = bloch.picture_invariance_check(h, B, beta)
            worst = max(worst, abs(z - z_tilde) / z)
        count += 1
    report(capsys, 1, "picture invariance of Z", [
        ("instances", count == 200, f"{count} pairs, dims 2-8"),
        ("max |Z - Z~|/Z", worst < 1e-10, f"{worst:.2e} < 1e-10"),
    ], t0)


def test_criterion_2_metric_construction(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 1)
    inter = fact = 0.0
    min_eig = math.inf
    for i in range(100):
        H, _, _ = random_quasi_hermitian(rng, 2 + i % 7)
        pair = build_metric(H)
        inter = max(inter, intertwining_residual(H, pair.theta))
        fact = max(fact, pair.factorization_residual())
        min_eig = min(min_eig, pair.min_eigenvalue())
    report(capsys, 2, "metric construction", [
        ("intertwining", inter < 1e-10, f"{inter:.2e} < 1e-10"),
        ("min eigenvalue", min_eig > 0, f"{min_eig:.3e} > 0"),
        ("factorization", fact < 1e-12, f"{fact:.2e} < 1e-12"),
    ], t0)


def _fig1_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert cli.main(["fig1", "--out", str(out)]) == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_criterion_3_perturbative_partition(capsys, tmp_path):
    t0 = time.perf_counter()
    a, b = 1.0, 2.0
    betas = np.linspace(0.1, 10.0, 100)
    eps_values = (0.01, 0.02, 0.03, 0.04)

    # K = 2 Dyson result against the closed second-order expression
    formula_gap = 0.0
    for eps in (*eps_values, 0.1):
        expansion = bloch.dyson_expand_hamiltonian(two_level(TwoLevelParams(a, b, eps))[0], 2, epsilon=eps)
        for beta in betas:
            z_pert = bloch.partition_perturbative(expansion, beta)
            ea, eb = math.exp(-a * beta), math.exp(-b * beta)
            z_formula = ea + eb + eps**2 * beta / (a - b) * (ea - eb)
            formula_gap = max(formula_gap, abs(z_pert - z_formula) / z_formula)

    # eps^4 scaling of the truncation error at every beta
    slopes = []
    for beta in betas:
        errs = []
        for eps in eps_values:
            p = TwoLevelParams(a, b, eps)
            expansion = bloch.dyson_expand_hamiltonian(two_level(p)[0], 2, epsilon=eps)
            errs.append(abs(bloch.partition_perturbative(expansion, beta) - thermo.z_s_exact(p, beta)))
        slopes.append(np.polyfit(np.log(eps_values), np.log(errs), 1)[0])
    slopes = np.array(slopes)

    # regenerated log-error curves
    by_eps = {}
    for row in _fig1_csv(tmp_path):
        by_eps.setdefault(float(row["epsilon"]), []).append(float(row["delta"]))
    eps_sorted = sorted(by_eps)
    curves = np.array([by_eps[e] for e in eps_sorted])
    ordered = bool(np.all(np.diff(curves, axis=0) > 0))
    # separation in decades divided by log10 of the coupling ratio
    sep = [
        (curves[i + 1] - curves[i]) / math.log10(eps_sorted[i + 1] / eps_sorted[i])
        for i in range(len(eps_sorted) - 1)
    ]
    sep = np.concatenate(sep)
    report(capsys, 3, "perturbative partition function", [
        ("K=2 vs formula", formula_gap < 1e-14, f"max rel {formula_gap:.2e} < 1e-14"),
        ("log-log slope", bool(np.all(np.abs(slopes - 4) <= 0.2)), f"range [{slopes.min():.4f}, {slopes.max():.4f}] in 4 +- 0.2"),
        ("error curves", ordered and curves.shape[1] > 0, f"{curves.shape[1]} betas, larger eps has larger error at every beta: {ordered}"),
        ("curve separation", bool(np.all(np.abs(sep - 4) <= 0.2)), f"decades/log10(ratio) in [{sep.min():.4f}, {sep.max():.4f}]"),
    ], t0)


def test_criterion_4_thermodynamic_identities(capsys):
    t0 = time.perf_counter()
    p = TwoLevelParams(1.0, 2.0, 0.1)
    n, m, eps_bar = 1.0, 2.0, 0.1
    betas = np.linspace(0.1, 10.0, 50)
    volumes = np.linspace(0.5, 3.0, 20)

    def rel(x, ref):
        return abs(x - ref) / abs(ref)

    worst = dict.fromkeys(("S", "U", "c_v", "P"), 0.0)
    euler = 0.0
    for beta in betas:
        closed = thermo.two_level_thermo_point(p, beta)
        fd = thermo.thermo_point_numeric(lambda x: thermo.z_s_perturbative(p, x), beta)
        worst["S"] = max(worst["S"], rel(fd.entropy, closed.entropy))
        worst["U"] = max(worst["U"], rel(fd.internal_energy, closed.internal_energy))
        worst["c_v"] = max(worst["c_v"], rel(fd.specific_heat, closed.specific_heat))
        euler = max(euler, closed.euler_residual())
        for v in volumes:
            P = thermo.two_level_pressure(n, m, eps_bar, v, beta)
            fd_p = thermo.thermo_point_numeric(
                lambda x: 1.0, beta, v=v,
                Zv=lambda bb, vv: thermo.z_s_perturbative(TwoLevelParams.from_volume(n, m, eps_bar, vv), bb),
            ).pressure
            worst["P"] = max(worst["P"], rel(fd_p, P))
    checks = [(k, val < 1e-6, f"{val:.2e} < 1e-6") for k, val in worst.items()]
    checks.append(("Euler F = U - S/beta", euler < 1e-6, f"{euler:.2e} < 1e-6"))
    report(capsys, 4, "thermodynamic identities", checks, t0)


def test_criterion_5_specific_heat_curve(capsys, tmp_path):
    t0 = time.perf_counter()
    p = TwoLevelParams(1.0, 4.0, 0.01)
    out = tmp_path / "fig2.csv"
    assert cli.main(["fig2", "--out", str(out)]) == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    T = np.array([float(r["T"]) for r in rows])
    cv = np.array([float(r["c_v"]) for r in rows])

    negative = T[cv < 0]
    nonneg = negative.size == 0
    neg_info = "none" if nonneg else (
        f"{negative.size} of {T.size} points negative, T <= {negative.max():.3f}, min c_v {cv.min():.2e}"
    )

    low_end = abs(cv[0])
    high_limit = abs(thermo.two_level_specific_heat(p, 1e-4))
    peak = thermo.specific_heat_peak(p, thermo.temperature_grid(0.01, 5.0, T.size))
    fine = thermo.specific_heat_peak(p, thermo.temperature_grid(0.01, 5.0, 2 * T.size - 1))
    dT = abs(peak.temperature - fine.temperature)
    dc = abs(peak.height - fine.height)
    report(capsys, 5, "specific heat curve", [
        ("c_v >= 0", nonneg, neg_info),
        ("T -> 0 end", low_end < 1e-3, f"|c_v(T={T[0]:g})| = {low_end:.2e} < 1e-3"),
        ("T -> inf limit", high_limit < 1e-3, f"|c_v(T=1e4)| = {high_limit:.2e} < 1e-3 (c_v(T={T[-1]:g}) = {cv[-1]:.3e})"),
        ("single maximum", peak.interior_maxima == 1, f"{peak.interior_maxima} interior maxima"),
        ("peak", True, f"T* = {peak.temperature:.10f}, c_v* = {peak.height:.10f}"),
        ("refinement x2", dT < 1e-6 and dc < 1e-6, f"dT* = {dT:.1e}, dc_v* = {dc:.1e} < 1e-6"),
    ], t0)


def test_criterion_6_dyson_convergence(capsys):
    t0 = time.perf_counter()
    p = TwoLevelParams(1.0, 2.0, 0.1)
    H = two_level(p)[0]
    expansion = bloch.dyson_expand_hamiltonian(H, 8, epsilon=p.epsilon)
    z_exact = bloch.partition_exact(H, 1.0)
    errs = [abs(bloch.partition_perturbative(expansion, 1.0, k) - z_exact) for k in range(9)]
    first = next((k for k, e in enumerate(errs) if e < 1e-12), None)
    even = errs[::2]
    monotone = all(x > y for x, y in zip(even, even[1:]))
    report(capsys, 6, "Dyson convergence", [
        ("below 1e-12", first is not None, f"first at K = {first}, error {errs[-1]:.1e} at K = 8"),
        ("even orders decrease", monotone, " > ".join(f"{e:.1e}" for e in even)),
    ], t0)


def test_criterion_7_cubic_oscillator(capsys):
    t0 = time.perf_counter()
    coarse = cubic_oscillator(400, 6.0).low_lying(5)
    fine = cubic_oscillator(800, 6.0).low_lying(5)
    ratio = float(np.max(np.abs(coarse.imag) / np.abs(coarse.real)))
    change = float(np.max(np.abs(fine - coarse) / np.abs(fine)))
    harmonic = cubic_oscillator(400, 6.0, "harmonic").low_lying(3)
    h_err = float(np.max(np.abs(harmonic - np.array([1.0, 3.0, 5.0]))))
    elapsed = time.perf_counter() - t0
    report(capsys, 7, "cubic oscillator", [
        ("|Im|/|Re|", ratio < 1e-3, f"{ratio:.1e} < 1e-3, levels {np.round(coarse.real, 5).tolist()}"),
        ("harmonic 1, 3, 5", h_err < 1e-3, f"max abs {h_err:.1e} < 1e-3"),
        ("400 vs 800", change < 1e-3, f"max rel {change:.1e} < 1e-3"),
        ("runtime", elapsed < 60, f"{elapsed:.1f}s < 60s"),
    ], t0)


def test_criterion_8_bloch_residual(capsys):
    t0 = time.perf_counter()
    H = two_level(TwoLevelParams(1.0, 2.0, 0.1))[0]
    betas = np.linspace(0.1, 5.0, 50)
    worst = max(bloch.bloch_residual(H, beta, h=1e-4) for beta in betas)
    report(capsys, 8, "Bloch equation", [
        ("max residual", worst < 1e-6, f"{worst:.2e} < 1e-6 over {betas.size} betas"),
    ], t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
