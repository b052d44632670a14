"""Experiment orchestration: single points, sweeps, CSV/JSON serialization.

Every mode writes `<out>/<mode>.csv` (RFC-4180, header row, one row per
sweep value or per sample, trailing `status` column) and a JSON sidecar
`<out>/<mode>.meta.json` with the resolved config, per-row solver
diagnostics, and any warnings.  Outputs are deterministic for a given
config: fixed grids, no randomness.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .dissipator import build_phonon_superoperator
from .dynamics import (build_liouvillian, decompose, default_tau_grid,
                       g1_correlation, steady_state)
from .oracles import (UnsupportedRegimeError, g1_coh_corrected, g1_coh_pd,
                      g1_inc_pd, polaron_rates, sideband_width_detuned)
from .params import PhysicalParams
from .quadrature import FrequencyGrid
from .spectrum import (FitError, default_omega_grid, extract_observables,
                       fit_triplet, incoherent_spectrum)
from .variational import solve_self_consistent


@dataclass
class PointResult:
    """Everything the modes need about one parameter point.

    notes carries convergence caveats (e.g. phonon correlations truncated at
    tau_max) as plain strings; a non-empty list marks the row as "warned".
    """

    params: PhysicalParams
    grid: FrequencyGrid
    sol: object
    kph: np.ndarray
    liouv: np.ndarray
    rho_ss: np.ndarray
    notes: tuple = ()

    @property
    def g1_coh(self):
        return float(abs(self.rho_ss[0, 1]) ** 2)

    @property
    def excited_population(self):
        return float(self.rho_ss[1, 1].real)


def solve_point(params: PhysicalParams, numerics, fixed_epsilon=None) -> PointResult:
    """Full chain: variational solve -> phonon dissipator -> steady state."""
    grid = FrequencyGrid.for_cutoff(params.omega_c, n=numerics.frequency_nodes)
    sol = solve_self_consistent(params, grid, tol=numerics.fixed_point_tol,
                                max_iter=numerics.max_iterations,
                                fixed_epsilon=fixed_epsilon)
    kph, corr, _ = build_phonon_superoperator(sol, params, grid,
                                              tau_max=numerics.time_max,
                                              decay_tol=numerics.decay_tol)
    notes = []
    if corr is not None and corr.k_table is not None \
            and not corr.k_table.all_decayed:
        notes.append(f"phonon correlations not decayed below tolerance at "
                     f"tau_max = {numerics.time_max:g} ps; rates carry "
                     f"truncation uncertainty")
    liouv = build_liouvillian(sol, kph, params.gamma1)
    rho_ss = steady_state(liouv)
    return PointResult(params=params, grid=grid, sol=sol, kph=kph,
                       liouv=liouv, rho_ss=rho_ss, notes=tuple(notes))


def _fmt(x):
    """Shortest round-trip decimal form; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _run_rows(work, values, threads):
    """Evaluate work(value) for every sweep value, preserving order.

    work returns (cells, notes); exceptions become per-row failed statuses
    instead of aborting the sweep.  Statuses come from in-band notes, so
    threaded and sequential runs produce identical output.
    """

    def guarded(value):
        try:
            cells, notes = work(value)
            return cells, ("warned" if notes else "ok"), list(notes), None
        except Exception as exc:  # recorded per-row, sweep continues
            return None, "failed", [], str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(guarded, values))
    else:
        results = [guarded(v) for v in values]

    rows, diags = [], []
    for value, (cells, status, notes, error) in zip(values, results):
        diags.append({"value": value, "status": status,
                      "warnings": notes, "error": error})
        if cells is None:
            cells = [value]  # keep the sweep value on failed rows
        rows.append((cells, status))
    return rows, diags


def _write_csv(path, header, rows, n_cells):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for cells, status in rows:
            cells = list(cells) + [None] * (n_cells - len(cells))
            writer.writerow([_fmt(c) for c in cells] + [status])


def _write_meta(path, config: ExperimentConfig, diagnostics, summary):
    meta = {
        "library": "qdemission",
        "version": __version__,
        "config": config.describe(),
        "rows": diagnostics,
        "summary": summary,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _pd_rates_if_valid(point: PointResult, numerics):
    """Polaron oracle rates, or None when they do not apply.

    The analytic pure-dephasing comparison is defined for resonant driving;
    it is emitted at every driving strength there (its breakdown at strong
    driving is the comparison's point).
    """
    if point.params.alpha == 0.0:
        return None
    if abs(point.sol.epsilon) > 0.05 * max(point.sol.omega_r, point.params.gamma1):
        return None
    return polaron_rates(point.params, point.grid, tau_max=numerics.time_max,
                         tol=numerics.decay_tol)


def _tau_grid(config: ExperimentConfig, liouv):
    modes = decompose(liouv)
    rates = -modes.eigenvalues.real
    nonzero = rates[rates > 0]
    slowest = float(np.min(nonzero)) if nonzero.size else None
    if config.grids.tau_max is not None:
        t_end = config.grids.tau_max
        n = config.grids.tau_points
        n_log = n // 4
        t_switch = t_end / 50.0
        return np.concatenate((
            [0.0], np.geomspace(t_switch * 1e-3, t_switch, n_log),
            np.linspace(t_switch, t_end, n - n_log)[1:]))
    return default_tau_grid(config.params.gamma1, slowest, config.grids.tau_points)


def _mode_g1(config: ExperimentConfig):
    point = solve_point(config.params, config.numerics)
    taus = _tau_grid(config, point.liouv)
    series = g1_correlation(point.liouv, point.rho_ss, taus)
    rates = _pd_rates_if_valid(point, config.numerics)
    pd_inc = pd_tot = None
    if rates is not None:
        try:
            pd_inc = g1_inc_pd(taus, rates.omega_r, config.params.gamma1,
                               rates.gamma_pd)
            pd_tot = pd_inc + g1_coh_pd(rates.omega_r, config.params.gamma1,
                                        rates.gamma_pd)
        except UnsupportedRegimeError:
            pd_inc = pd_tot = None

    header = ["tau", "g1_re", "g1_im", "g1_abs", "g1_arg", "g1_inc_re",
              "g1_inc_im", "g1_coh", "g1_pd_inc", "g1_pd_total"]
    rows = []
    for i, tau in enumerate(taus):
        g1 = series.g1_values[i]
        inc = series.g1_inc_values[i]
        rows.append(([tau, g1.real, g1.imag, abs(g1), np.angle(g1), inc.real,
                      inc.imag, series.g1_coh,
                      None if pd_inc is None else pd_inc[i],
                      None if pd_tot is None else pd_tot[i]], "ok"))
    summary = {
        "g1_coh": series.g1_coh,
        "g1_total0": point.excited_population,
        "omega_r": point.sol.omega_r,
        "epsilon": point.sol.epsilon,
        "solver_residual": point.sol.residual,
        "solver_iterations": len(point.sol.history),
        "pure_dephasing_valid": rates is not None and pd_inc is not None,
    }
    status = "warned" if point.notes else "ok"
    rows = [(cells, status) for cells, _ in rows]
    diagnostics = [{"value": None, "status": status,
                    "warnings": list(point.notes), "error": None}]
    return header, rows, diagnostics, summary


def _mode_coherent_sweep(config: ExperimentConfig):
    header = ["omega", "omega_r", "epsilon", "g1_coh_full", "g1_inc0_full",
              "g1_total0", "g1_coh_pd", "G1_coh_eq4"]

    def work(omega):
        params = replace(config.params, omega=omega)
        point = solve_point(params, config.numerics)
        rates = polaron_rates(params, point.grid,
                              tau_max=config.numerics.time_max,
                              tol=config.numerics.decay_tol)
        coh_pd = g1_coh_pd(rates.omega_r, params.gamma1, rates.gamma_pd)
        eq4 = g1_coh_corrected(rates.omega_r, omega, params.gamma1,
                               rates.gamma_pd, rates.kappa) if omega > 0 else 0.0
        return [omega, point.sol.omega_r, point.sol.epsilon, point.g1_coh,
                point.excited_population - point.g1_coh,
                point.excited_population, coh_pd, eq4], point.notes

    rows, diags = _run_rows(work, config.sweep_values, config.threads)
    return header, rows, diags, {"n_points": len(config.sweep_values)}


def _fit_point(point: PointResult, config: ExperimentConfig):
    eta = float(np.hypot(point.sol.epsilon, point.sol.omega_r))
    om_grid = default_omega_grid(eta, point.params.gamma1,
                                 n=config.grids.omega_points,
                                 span_factor=config.grids.omega_span)
    spec = incoherent_spectrum(point.liouv, point.rho_ss, om_grid)
    return spec, fit_triplet(spec)


def _width_prediction(config, point):
    rates = polaron_rates(point.params, point.grid,
                          tau_max=config.numerics.time_max,
                          tol=config.numerics.decay_tol)
    return sideband_width_detuned(point.params.gamma1, rates.gamma_pd,
                                  point.sol.epsilon, point.sol.omega_r)


def _mode_detuning_sweep(config: ExperimentConfig):
    header = ["epsilon", "splitting", "red_fwhm", "blue_fwhm",
              "central_fwhm", "width_prediction"]

    def work(eps):
        point = solve_point(config.params, config.numerics, fixed_epsilon=eps)
        _, fit = _fit_point(point, config)
        splitting, red, blue, central = extract_observables(fit)
        return [eps, splitting, red, blue, central,
                _width_prediction(config, point)], point.notes

    rows, diags = _run_rows(work, config.sweep_values, config.threads)
    return header, rows, diags, {"n_points": len(config.sweep_values)}


def _mode_resonant_sweep(config: ExperimentConfig):
    header = ["omega", "omega_r", "splitting", "red_fwhm", "blue_fwhm",
              "central_fwhm", "width_prediction"]

    def work(omega):
        params = replace(config.params, omega=omega)
        point = solve_point(params, config.numerics)
        _, fit = _fit_point(point, config)
        splitting, red, blue, central = extract_observables(fit)
        return [omega, point.sol.omega_r, splitting, red, blue, central,
                _width_prediction(config, point)], point.notes

    rows, diags = _run_rows(work, config.sweep_values, config.threads)
    return header, rows, diags, {"n_points": len(config.sweep_values)}


def _mode_spectrum(config: ExperimentConfig):
    point = solve_point(config.params, config.numerics)
    spec, fit = None, None
    fit_error = None
    eta = float(np.hypot(point.sol.epsilon, point.sol.omega_r))
    om_grid = default_omega_grid(eta, config.params.gamma1,
                                 n=config.grids.omega_points,
                                 span_factor=config.grids.omega_span)
    spec = incoherent_spectrum(point.liouv, point.rho_ss, om_grid)
    try:
        fit = fit_triplet(spec)
    except FitError as exc:
        fit_error = str(exc)

    header = ["omega", "s_inc"]
    rows = [([om, s], "ok") for om, s in zip(spec.omega_grid, spec.s_values)]
    summary = {
        "omega_r": point.sol.omega_r,
        "epsilon": point.sol.epsilon,
        "g1_coh": point.g1_coh,
        "fit": None if fit is None else {
            "splitting": fit.splitting,
            "fit_residual": fit.fit_residual,
            "peaks": [{"position": p.position, "fwhm": p.fwhm,
                       "amplitude": p.amplitude} for p in fit.peaks],
        },
        "fit_error": fit_error,
    }
    notes = list(point.notes) + ([fit_error] if fit_error else [])
    status = "warned" if notes else "ok"
    rows = [(cells, status) for cells, _ in rows]
    diagnostics = [{"value": None, "status": status, "warnings": notes,
                    "error": None}]
    return header, rows, diagnostics, summary


def _mode_oracle_compare(config: ExperimentConfig):
    point = solve_point(config.params, config.numerics)
    taus = _tau_grid(config, point.liouv)
    series = g1_correlation(point.liouv, point.rho_ss, taus)
    rates = polaron_rates(config.params, point.grid,
                          tau_max=config.numerics.time_max,
                          tol=config.numerics.decay_tol)
    pd_total = g1_inc_pd(taus, rates.omega_r, config.params.gamma1,
                         rates.gamma_pd) \
        + g1_coh_pd(rates.omega_r, config.params.gamma1, rates.gamma_pd)

    header = ["tau", "g1_full_re", "g1_full_im", "g1_pd", "diff_abs"]
    rows = []
    diffs = np.abs(series.g1_values - pd_total)
    for i, tau in enumerate(taus):
        g1 = series.g1_values[i]
        rows.append(([tau, g1.real, g1.imag, pd_total[i], diffs[i]], "ok"))
    g10 = float(series.g1_values[0].real)
    summary = {
        "max_abs_diff": float(np.max(diffs)),
        "max_rel_to_g1_0": float(np.max(diffs) / g10) if g10 else None,
        "g1_coh_full": series.g1_coh,
        "g1_coh_pd": g1_coh_pd(rates.omega_r, config.params.gamma1,
                               rates.gamma_pd),
        "omega_r_full": point.sol.omega_r,
        "omega_r_polaron": rates.omega_r,
    }
    status = "warned" if point.notes else "ok"
    rows = [(cells, status) for cells, _ in rows]
    diagnostics = [{"value": None, "status": status,
                    "warnings": list(point.notes), "error": None}]
    return header, rows, diagnostics, summary


_MODE_RUNNERS = {
    "g1": _mode_g1,
    "coherent_sweep": _mode_coherent_sweep,
    "spectrum": _mode_spectrum,
    "detuning_sweep": _mode_detuning_sweep,
    "resonant_sweep": _mode_resonant_sweep,
    "oracle_compare": _mode_oracle_compare,
}


def run_experiment(config: ExperimentConfig):
    """Run the configured mode; write CSV + meta JSON; return a summary."""
    out_dir = Path(config.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows, diagnostics, summary = _MODE_RUNNERS[config.mode](config)
    csv_path = out_dir / f"{config.mode}.csv"
    meta_path = out_dir / f"{config.mode}.meta.json"
    _write_csv(csv_path, header + ["status"], rows, len(header))
    _write_meta(meta_path, config, diagnostics, summary)
    return {"csv": str(csv_path), "meta": str(meta_path), "summary": summary,
            "n_rows": len(rows),
            "n_failed": sum(1 for _, s in rows if s == "failed")}


def run_checks(config: ExperimentConfig, n_random=50, seed=7):
    """Invariant suite on the configured point (the CLI --check path)."""
    from .operators import TRACE_VECTOR, unvec, vec, hermitize
    from .dynamics import check_density_matrix

    point = solve_point(config.params, config.numerics)
    rng = np.random.default_rng(seed)
    checks = []

    f = np.asarray(point.sol.f_values)
    checks.append(("F(omega) within [0, 1]",
                   bool(np.all(f >= -1e-12) and np.all(f <= 1.0 + 1e-12)),
                   f"range [{f.min():.3g}, {f.max():.3g}]"))
    checks.append(("self-consistency residual < 1e-10",
                   point.sol.residual < 1e-10, f"{point.sol.residual:.3e}"))
    tr_defects = []
    herm_defects = []
    for _ in range(n_random):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = hermitize(a)
        out = unvec(point.kph @ vec(rho))
        tr_defects.append(abs(np.trace(out)))
        herm_defects.append(np.max(np.abs(out - out.conj().T)))
    checks.append(("K_ph annihilates trace (< 1e-12)",
                   max(tr_defects) < 1e-12, f"max {max(tr_defects):.3e}"))
    checks.append(("K_ph preserves hermiticity (< 1e-12)",
                   max(herm_defects) < 1e-12, f"max {max(herm_defects):.3e}"))
    residual = float(np.linalg.norm(point.liouv @ vec(point.rho_ss)))
    checks.append(("steady-state residual < 1e-12", residual < 1e-12,
                   f"{residual:.3e}"))
    diag = check_density_matrix(point.rho_ss)
    checks.append(("steady state physical (eig >= -1e-10)", diag["ok"],
                   f"min eig {diag['min_eigenvalue']:.3e}"))
    trace_kernel = float(np.linalg.norm(TRACE_VECTOR @ point.liouv))
    checks.append(("trace left-eigenvector of L (< 1e-12)",
                   trace_kernel < 1e-12, f"{trace_kernel:.3e}"))
    series = g1_correlation(point.liouv, point.rho_ss,
                            np.array([0.0, 1.0 / config.params.gamma1]))
    checks.append(("g1(0) equals excited population (< 1e-10)",
                   abs(series.g1_values[0].real - point.excited_population) < 1e-10,
                   f"diff {abs(series.g1_values[0].real - point.excited_population):.3e}"))
    checks.append(("g1_coh equals |rho_0X|^2 (< 1e-10)",
                   abs(series.g1_coh - point.g1_coh) < 1e-10,
                   f"diff {abs(series.g1_coh - point.g1_coh):.3e}"))
    return checks
