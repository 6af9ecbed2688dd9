"""Command-line driver.

Every subcommand writes CSV: ``#`` comment lines (the first records the
full run configuration), a header row, then data rows with floats in
17-significant-digit scientific notation.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Iterable, TextIO

import numpy as np

from . import bloch, linalg, thermo
from .models import TwoLevelParams, cubic_oscillator, two_level, validate_closed_form_B
from .pseudoherm import (
    SpectrumError,
    build_metric,
    classify_spectrum,
    intertwining_residual,
    to_hermitian_picture,
    transform_observable,
)
from .sampling import random_hermitian, random_invertible

COMMANDS = ("metric", "spectrum", "partition", "thermo", "fig1", "fig2", "eos", "cubic", "audit")

BASE_DEFAULTS = {
    "a": 1.0,
    "b": 2.0,
    "eps": 0.1,
    "n": 1.0,
    "m": 2.0,
    "eps_bar": 0.1,
    "v": 1.0,
    "beta_min": 0.1,
    "beta_max": 10.0,
    "beta_count": 50,
    "N": 1,
    "order": 2,
    "seed": 42,
    "tol": 1e-10,
    "out": "-",
    "matrix": None,
    "eps_list": "0.01,0.02,0.03",
    "delta_base": 10.0,
    "t_min": 0.01,
    "t_max": 5.0,
    "t_count": 500,
    "v_min": 0.5,
    "v_max": 3.0,
    "v_count": 20,
    "grid_points": 400,
    "L": 6.0,
    "levels": 5,
    "potential": "cubic",
    "beta": 2.0,
    "repeats": 10,
}

COMMAND_DEFAULTS = {
    "fig1": {"beta_count": 200},
    "fig2": {"a": 1.0, "b": 4.0, "eps": 0.01},
    "spectrum": {"tol": 1e-8},
    "metric": {"tol": 1e-8},
}

_FLOAT_KEYS = {
    "a", "b", "eps", "n", "m", "eps_bar", "v", "beta_min", "beta_max", "tol",
    "t_min", "t_max", "v_min", "v_max", "L", "beta", "delta_base",
}
_INT_KEYS = {"beta_count", "N", "order", "seed", "t_count", "v_count", "grid_points", "levels", "repeats"}


# ---------------------------------------------------------------------------
# matrix and config files


def read_matrix(path: str) -> np.ndarray:
    """Read ``dim`` then ``dim**2`` lines of ``re im`` in row-major order."""
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    dim = int(lines[0][0])
    entries = lines[1:]
    if dim < 1 or len(entries) != dim * dim:
        raise ValueError(f"{path}: expected {dim * dim} entries, found {len(entries)}")
    values = [complex(float(re), float(im)) for re, im in entries]
    return np.array(values, dtype=np.complex128).reshape(dim, dim)


def write_matrix(path: str, A: np.ndarray) -> None:
    A = np.asarray(A, dtype=np.complex128)
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]}\n")
        for z in A.ravel():
            fh.write(f"{z.real:.16e} {z.imag:.16e}\n")


def read_config(path: str) -> dict[str, str]:
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.lstrip("-").replace("-", "_")] = value
    return cfg


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    return value


def resolve_config(args: argparse.Namespace) -> dict:
    """Command line > config file > command defaults > base defaults."""
    cfg = dict(BASE_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        for key, value in read_config(args.config).items():
            if key not in BASE_DEFAULTS:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, value)
    for key in BASE_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["beta_min"] <= 0 or cfg["beta_count"] < 1:
        raise ValueError("beta grid needs beta-min > 0 and beta-count >= 1")
    return cfg


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        return ""
    return f"{x:.16e}"


def write_csv(out: TextIO, cfg: dict, columns: list[str], rows: Iterable, notes: Iterable[str] = ()) -> None:
    items = "; ".join(f"{k}={cfg[k]}" for k in sorted(cfg) if k not in ("config", "out"))
    out.write(f"# config: {items}\n")
    for note in notes:
        out.write(f"# {note}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(x) for x in row) + "\n")


def beta_grid(cfg) -> np.ndarray:
    return np.linspace(cfg["beta_min"], cfg["beta_max"], cfg["beta_count"])


def _toy(cfg) -> TwoLevelParams:
    return TwoLevelParams(cfg["a"], cfg["b"], cfg["eps"])


def _input_matrix(cfg) -> np.ndarray:
    if cfg["matrix"]:
        return linalg.as_matrix(read_matrix(cfg["matrix"]))
    return two_level(_toy(cfg))[0]


# ---------------------------------------------------------------------------
# commands


def run_metric(cfg):
    H = _input_matrix(cfg)
    pair = build_metric(H, cfg["tol"])
    h = to_hermitian_picture(H, pair)
    notes = [
        f"intertwining_residual={intertwining_residual(H, pair.theta):.3e}",
        f"factorization_residual={pair.factorization_residual():.3e}",
        f"theta_min_eigenvalue={pair.min_eigenvalue():.16e}",
        f"hermitian_picture_residual={linalg.hermiticity_residual(h):.3e}",
    ]
    if not cfg["matrix"]:
        rep = validate_closed_form_B(_toy(cfg))
        notes.append(
            "closed_form_B: "
            f"cond={rep.condition_number:.3e} hermitian_residual={rep.hermitian_residual:.3e} "
            f"intertwining_residual={rep.intertwining_residual:.3e} passed={rep.passed}"
        )
    dim = H.shape[0]
    rows = [
        (i, j, pair.theta[i, j].real, pair.theta[i, j].imag, pair.factor[i, j].real, pair.factor[i, j].imag)
        for i in range(dim)
        for j in range(dim)
    ]
    return ["row", "col", "theta_re", "theta_im", "factor_re", "factor_im"], rows, notes


def run_spectrum(cfg):
    H = _input_matrix(cfg)
    spectrum = classify_spectrum(H, cfg["tol"])
    order = np.lexsort((spectrum.eigenvalues.imag, spectrum.eigenvalues.real))
    notes = [f"kind={spectrum.kind.value}", f"pairs={spectrum.pairs}"]
    rows = [(int(i), spectrum.eigenvalues[i].real, spectrum.eigenvalues[i].imag) for i in order]
    return ["index", "re", "im"], rows, notes


def run_partition(cfg):
    H = _input_matrix(cfg)
    expansion = bloch.dyson_expand_hamiltonian(H, cfg["order"])
    rows = []
    for beta in beta_grid(cfg):
        rows.append(
            (
                beta,
                bloch.partition_exact(H, beta),
                bloch.partition_trace(H, beta),
                bloch.partition_perturbative(expansion, beta),
            )
        )
    return ["beta", "Z_exact", "Z_trace", "Z_pert"], rows, [f"dyson_order={cfg['order']}"]


def run_thermo(cfg):
    p = _toy(cfg)
    N = cfg["N"]
    rows = []
    worst = 0.0
    for beta in beta_grid(cfg):
        pt = thermo.two_level_thermo_point(p, beta, N)
        num = thermo.thermo_point_numeric(lambda b: thermo.z_s_perturbative(p, b), beta, N)
        for key in ("entropy", "internal_energy", "specific_heat"):
            ref = getattr(pt, key)
            worst = max(worst, abs(getattr(num, key) - ref) / max(abs(ref), 1e-300))
        rows.append(
            (beta, 1 / beta, pt.z_s, pt.free_energy, pt.entropy, pt.internal_energy,
             pt.specific_heat, pt.euler_residual())
        )
    notes = [f"max_rel_gap_closed_form_vs_finite_difference={worst:.3e}"]
    return ["beta", "T", "z_s", "F", "S", "U", "c_v", "euler_residual"], rows, notes


def run_fig1(cfg):
    a, b = cfg["a"], cfg["b"]
    eps_list = [float(e) for e in str(cfg["eps_list"]).split(",") if e.strip()]
    if not eps_list:
        raise ValueError("eps-list is empty")
    grid = beta_grid(cfg)
    rows = []
    for eps in eps_list:
        p = TwoLevelParams(a, b, eps)
        p.require_real()
        H, _ = two_level(p)
        expansion = bloch.dyson_expand_hamiltonian(H, cfg["order"])
        for beta in grid:
            z_pert = bloch.partition_perturbative(expansion, beta)
            z_ex = thermo.z_s_exact(p, beta)
            rows.append((beta, eps, z_pert, z_ex, thermo.log_relative_error(z_pert, z_ex, cfg["delta_base"])))
    rows.sort(key=lambda r: (r[0], r[1]))
    # at each beta, delta must increase with epsilon (rows are sorted that way)
    monotone = all(
        r[4] < s[4] for r, s in zip(rows, rows[1:]) if r[0] == s[0] and r[1] < s[1]
    )
    notes = [
        f"delta=log_{cfg['delta_base']:g}|(Z_pert-Z_exact)/Z_exact|",
        f"delta_increasing_in_epsilon_at_every_beta={monotone}",
    ]
    return ["beta", "epsilon", "Z_pert", "Z_exact", "delta"], rows, notes


def run_fig2(cfg):
    p = _toy(cfg)
    p.require_real()
    T = thermo.temperature_grid(cfg["t_min"], cfg["t_max"], cfg["t_count"])
    rows = [(t, thermo.two_level_specific_heat(p, 1 / t)) for t in T]
    peak = thermo.specific_heat_peak(p, T)
    notes = [
        f"peak_T={peak.temperature:.16e}",
        f"peak_c_v={peak.height:.16e}",
        f"interior_maxima={peak.interior_maxima}",
    ]
    return ["T", "c_v"], rows, notes


def run_eos(cfg):
    n, m, eb, N = cfg["n"], cfg["m"], cfg["eps_bar"], cfg["N"]
    volumes = np.linspace(cfg["v_min"], cfg["v_max"], cfg["v_count"])
    if volumes.min() <= 0:
        raise ValueError("volume grid must be positive")
    rows = []
    worst_fd = worst_ref = 0.0
    for v in volumes:
        TwoLevelParams.from_volume(n, m, eb, v).require_real()
        for beta in beta_grid(cfg):
            P = thermo.two_level_pressure(n, m, eb, v, beta, N)
            fd = thermo.thermo_point_numeric(
                lambda b: thermo.z_s_perturbative(TwoLevelParams.from_volume(n, m, eb, v), b),
                beta, N, v=v,
                Zv=lambda b, x: thermo.z_s_perturbative(TwoLevelParams.from_volume(n, m, eb, x), b),
            ).pressure
            worst_fd = max(worst_fd, abs(P - fd) / abs(P))
            worst_ref = max(worst_ref, abs(P - thermo.reference_pressure(n, m, eb, v, beta, N)) / abs(P))
            rows.append((v, 1 / beta, P))
    notes = [
        f"max_rel_gap_vs_finite_difference={worst_fd:.3e}",
        f"max_rel_gap_vs_reference_expression={worst_ref:.3e}",
    ]
    return ["v", "T", "P"], rows, notes


def run_cubic(cfg):
    k = cfg["levels"]
    coarse = cubic_oscillator(cfg["grid_points"], cfg["L"], cfg["potential"])
    fine = cubic_oscillator(2 * cfg["grid_points"], cfg["L"], cfg["potential"])
    w, wf = coarse.low_lying(k), fine.low_lying(k)
    rows = [
        (j, w[j].real, w[j].imag, wf[j].real, wf[j].imag, abs(wf[j] - w[j]) / abs(wf[j]))
        for j in range(len(w))
    ]
    z = bloch.partition_exact(coarse.matrix, cfg["beta"], levels=k, tol=1e-3)
    zf = bloch.partition_exact(fine.matrix, cfg["beta"], levels=k, tol=1e-3)
    notes = [
        f"pt_residual={coarse.pt_residual():.3e}",
        f"Z_lowest_levels(beta={cfg['beta']})={z:.16e}",
        f"Z_lowest_levels_refined={zf:.16e}",
    ]
    return ["level", "re", "im", "re_refined", "im_refined", "rel_change"], rows, notes


def audit_instance(h: np.ndarray, B: np.ndarray, betas, rng: np.random.Generator) -> dict[str, float]:
    """Max relative gaps for one (Hermitian h, invertible B) instance."""
    Binv = linalg.inverse(B)
    H = Binv @ h @ B
    A = random_hermitian(rng, h.shape[0])
    A_tilde = Binv @ A @ B
    gaps = {"z_gap": 0.0, "mean_gap": 0.0}
    for beta in betas:
        z, z_tilde = bloch.picture_invariance_check(h, B, beta)
        gaps["z_gap"] = max(gaps["z_gap"], abs(z - z_tilde) / abs(z))
        rho = bloch.density_matrix(h, beta).matrix
        rho_tilde = bloch.density_matrix(H, beta).matrix
        diff = abs(np.trace(A @ rho) - np.trace(A_tilde @ rho_tilde))
        gaps["mean_gap"] = max(gaps["mean_gap"], diff / (np.linalg.norm(A, 2) * z))
    pair = build_metric(H)
    gaps["metric_residual"] = max(intertwining_residual(H, pair.theta), pair.factorization_residual())
    gaps["hermitian_residual"] = linalg.hermiticity_residual(to_hermitian_picture(H, pair))
    # observable transformed with the constructed metric is theta-Hermitian
    gaps["observable_residual"] = intertwining_residual(transform_observable(A, pair), pair.theta)
    return gaps


AUDIT_KEYS = ("z_gap", "mean_gap", "metric_residual", "hermitian_residual", "observable_residual")


def run_audit(cfg):
    rng = np.random.default_rng(cfg["seed"])
    betas = (0.1, 1.0, 5.0)
    fixed_B = linalg.as_matrix(read_matrix(cfg["matrix"])) if cfg["matrix"] else None
    if fixed_B is not None:
        linalg.inverse(fixed_B)
    dims = [fixed_B.shape[0]] if fixed_B is not None else list(range(2, 9))
    rows = []
    for dim in dims:
        worst = dict.fromkeys(AUDIT_KEYS, 0.0)
        instances = []
        if dim == 2 and fixed_B is None:
            p = TwoLevelParams(1.0, 2.0, 0.1)
            pair = build_metric(two_level(p)[0])
            instances.append((to_hermitian_picture(two_level(p)[0], pair), pair.factor))
        for _ in range(cfg["repeats"]):
            h = random_hermitian(rng, dim)
            B = fixed_B if fixed_B is not None else random_invertible(rng, dim)
            instances.append((h, B))
        for h, B in instances:
            for key, value in audit_instance(h, B, betas, rng).items():
                worst[key] = max(worst[key], value)
        rows.append((dim, len(instances), *(worst[k] for k in AUDIT_KEYS)))
    failed = [r for r in rows if max(r[2:]) > cfg["tol"]]
    notes = [f"tol={cfg['tol']:.3e}", f"status={'FAIL' if failed else 'PASS'}"]
    return ["dim", "instances", *AUDIT_KEYS], rows, notes, bool(failed)


RUNNERS = {
    "metric": run_metric,
    "spectrum": run_spectrum,
    "partition": run_partition,
    "thermo": run_thermo,
    "fig1": run_fig1,
    "fig2": run_fig2,
    "eos": run_eos,
    "cubic": run_cubic,
    "audit": run_audit,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("model and grid")
    for flag in ("--a", "--b", "--eps", "--n", "--m", "--eps-bar", "--v",
                 "--beta-min", "--beta-max", "--tol"):
        g.add_argument(flag, type=float, default=None)
    for flag in ("--beta-count", "--N", "--order", "--seed"):
        g.add_argument(flag, type=int, default=None)
    g.add_argument("--out", default=None, help="output CSV path ('-' for stdout)")
    g.add_argument("--config", default=None, help="key=value file; command-line flags take precedence")
    g.add_argument("--matrix", default=None, help="matrix file: dim, then dim^2 lines 're im'")

    parser = argparse.ArgumentParser(
        prog="pseudotherm",
        description="Thermodynamics of pseudo-Hermitian Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "metric": "positive metric and factor for a matrix (or the toy model)",
        "spectrum": "eigenvalues and real/conjugate-pair classification",
        "partition": "exact, trace and Dyson partition functions over a beta grid",
        "thermo": "closed-form thermodynamics of the toy model over a beta grid",
        "fig1": "log10 relative error of the second-order partition function",
        "fig2": "specific heat against temperature",
        "eos": "pressure over a (v, T) grid",
        "cubic": "low-lying levels of the discretized p^2 + i x^3 oscillator",
        "audit": "picture-invariance and metric audit over random instances",
    }
    subs = {name: sub.add_parser(name, parents=[shared], help=helps[name]) for name in COMMANDS}
    subs["fig1"].add_argument("--eps-list", default=None, help="comma-separated couplings")
    subs["fig1"].add_argument("--delta-base", type=float, default=None, help="log base of delta (default 10)")
    for flag, kind in (("--t-min", float), ("--t-max", float), ("--t-count", int)):
        subs["fig2"].add_argument(flag, type=kind, default=None)
    for flag, kind in (("--v-min", float), ("--v-max", float), ("--v-count", int)):
        subs["eos"].add_argument(flag, type=kind, default=None)
    subs["cubic"].add_argument("--grid-points", type=int, default=None)
    subs["cubic"].add_argument("--L", type=float, default=None)
    subs["cubic"].add_argument("--levels", type=int, default=None)
    subs["cubic"].add_argument("--potential", choices=("cubic", "harmonic"), default=None)
    subs["cubic"].add_argument("--beta", type=float, default=None)
    subs["audit"].add_argument("--repeats", type=int, default=None, help="random instances per dimension")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result = RUNNERS[args.command](cfg)
    except (ValueError, SpectrumError, np.linalg.LinAlgError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = False
    if len(result) == 4:
        columns, rows, notes, failed = result
    else:
        columns, rows, notes = result
    if cfg["out"] in (None, "-"):
        write_csv(sys.stdout, cfg, columns, rows, notes)
    else:
        with open(cfg["out"], "w", newline="") as fh:
            write_csv(fh, cfg, columns, rows, notes)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
