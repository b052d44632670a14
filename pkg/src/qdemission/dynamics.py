"""Liouvillian assembly, steady states, and first-order field correlations.

The full generator of the master equation is a 4x4 matrix acting on
column-stacked density matrices.  Correlation functions come from the
quantum regression theorem evaluated through the Liouvillian
eigendecomposition, which gives machine-precision long-time asymptotes and
makes the emission spectrum a closed-form sum of complex Lorentzians.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import (SIGMA_M, SIGMA_P, SIGMA_X, SIGMA_Z, hamiltonian_superop,
                        hermitize, lindblad_dissipator, unvec, vec)
from .variational import VariationalSolution

STEADY_STATE_RESIDUAL = 1e-12
HERMITICITY_TOL = 1e-12
_EIG_COND_LIMIT = 1e12


class DegenerateSteadyStateError(RuntimeError):
    """The Liouvillian kernel is not one-dimensional."""


@dataclass
class CorrelationSeries:
    """g1(tau) samples plus the coherent asymptote.

    g1_coh equals |rho_0X|^2 of the steady state; g1_inc_values is
    g1_values - g1_coh, exact by construction.
    """

    tau_grid: np.ndarray
    g1_values: np.ndarray
    g1_coh: float

    @property
    def g1_inc_values(self):
        return self.g1_values - self.g1_coh


def bare_liouvillian(epsilon, omega_r, gamma1):
    """Generator without phonons: coherent part plus radiative decay."""
    h = 0.5 * (epsilon * SIGMA_Z + omega_r * SIGMA_X)
    return hamiltonian_superop(h) + gamma1 * lindblad_dissipator(SIGMA_M)


def build_liouvillian(sol: VariationalSolution, kph, gamma1):
    """Full generator: -(i/2)[eps sigma_z + Omega_r sigma_x, .] + K_ph + K_sp."""
    kph = np.asarray(kph, dtype=complex)
    if kph.shape != (4, 4):
        raise ValueError(f"phonon superoperator must be 4x4, got {kph.shape}")
    return bare_liouvillian(sol.epsilon, sol.omega_r, gamma1) + kph


@dataclass
class LiouvillianModes:
    """Eigendecomposition of a generator with the zero mode identified.

    The stationary eigenvalue is snapped to exactly zero (its computed
    magnitude is rounding noise) so that long-time asymptotes of
    correlations are drift-free.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left_inv: np.ndarray  # rows are dual vectors: left_inv @ right = I
    zero_index: int


def decompose(liouv) -> LiouvillianModes:
    liouv = np.asarray(liouv, dtype=complex)
    w, v = scipy.linalg.eig(liouv)
    cond = np.linalg.cond(v)
    if cond > _EIG_COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"defective Liouvillian (eigenvector condition {cond:.2e})")
    k0 = int(np.argmin(np.abs(w)))
    scale = np.max(np.abs(w)) if np.max(np.abs(w)) > 0 else 1.0
    others = np.abs(np.delete(w, k0))
    if others.size and np.min(others) < 1e-10 * scale:
        raise DegenerateSteadyStateError(
            f"second-smallest |eigenvalue| {np.min(others):.3e} indicates a "
            f"degenerate kernel")
    w[k0] = 0.0
    return LiouvillianModes(eigenvalues=w, right=v,
                            left_inv=np.linalg.inv(v), zero_index=k0)


def steady_state(liouv):
    """Null vector of the generator, hermitized and trace-normalized."""
    modes = decompose(np.asarray(liouv, dtype=complex))
    rho = unvec(modes.right[:, modes.zero_index])
    rho = hermitize(rho)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise DegenerateSteadyStateError("null vector is traceless")
    rho = rho / tr
    residual = np.linalg.norm(np.asarray(liouv) @ vec(rho))
    if residual > STEADY_STATE_RESIDUAL:
        warnings.warn(f"steady-state residual {residual:.2e} above "
                      f"{STEADY_STATE_RESIDUAL:g}", RuntimeWarning, stacklevel=2)
    return rho


def propagate(liouv, rho0, times):
    """rho(t) for each t via the eigendecomposition.

    Falls back to scaling-and-squaring stepping when the generator is
    numerically defective.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    try:
        modes = decompose(liouv)
    except np.linalg.LinAlgError:
        warnings.warn("defective Liouvillian; falling back to expm stepping",
                      RuntimeWarning, stacklevel=2)
        out = []
        for t in times:
            out.append(unvec(scipy.linalg.expm(np.asarray(liouv) * t) @ vec(rho0)))
        return np.array(out)
    coeff = modes.left_inv @ vec(rho0)
    evol = np.exp(np.outer(times, modes.eigenvalues)) * coeff  # (nt, 4)
    vecs = evol @ modes.right.T                                # rows are vec(rho)
    # column-stacked vec: unvec is a C-order reshape followed by a transpose
    return vecs.reshape(-1, 2, 2).transpose(0, 2, 1)


def _mode_amplitudes(modes: LiouvillianModes, x0):
    """Amplitudes a_k with Tr[sigma_- e^{L tau} X0] = sum_k a_k e^{l_k tau}."""
    coeff = modes.left_inv @ vec(x0)
    weights = np.array([np.trace(SIGMA_M @ unvec(modes.right[:, k]))
                        for k in range(4)])
    return coeff * weights


def default_tau_grid(gamma1, slowest_rate=None, n=2048):
    """Log-then-linear grid on [0, T] with T = max(20/Gamma_1, 14/slowest).

    The slow-rate extension keeps the incoherent tail below 1e-6 of g1(0)
    at the grid end even when the slowest mode decays slower than Gamma_1/2.
    """
    t_end = 20.0 / gamma1
    if slowest_rate is not None and slowest_rate > 0:
        t_end = max(t_end, 14.0 / slowest_rate)
    n_log = n // 4
    t_switch = t_end / 50.0
    log_part = np.geomspace(t_switch * 1e-3, t_switch, n_log)
    lin_part = np.linspace(t_switch, t_end, n - n_log)
    return np.concatenate(([0.0], log_part, lin_part[1:]))


def g1_correlation(liouv, rho_ss, tau_grid=None, gamma1=None) -> CorrelationSeries:
    """First-order field correlation from the regression theorem.

    g1(tau) = Tr[sigma_- e^{L tau} (rho_ss sigma_+)], evaluated as a sum of
    complex exponentials over the Liouvillian modes.  The zero-mode component
    is the coherent asymptote and is cross-checked against |rho_0X|^2.
    """
    liouv = np.asarray(liouv, dtype=complex)
    x0 = np.asarray(rho_ss) @ SIGMA_P
    try:
        modes = decompose(liouv)
    except np.linalg.LinAlgError:
        warnings.warn("defective Liouvillian; correlation via expm stepping",
                      RuntimeWarning, stacklevel=2)
        if tau_grid is None:
            tau_grid = default_tau_grid(gamma1 if gamma1 else 1.0)
        vals = np.array([np.trace(SIGMA_M @ unvec(
            scipy.linalg.expm(liouv * t) @ vec(x0))) for t in tau_grid])
        g1_coh = float(abs(rho_ss[0, 1]) ** 2)
        return CorrelationSeries(np.asarray(tau_grid), vals, g1_coh)

    amps = _mode_amplitudes(modes, x0)
    g1_coh = amps[modes.zero_index].real
    coherent_ref = abs(rho_ss[0, 1]) ** 2
    if abs(g1_coh - coherent_ref) > 1e-10 * max(1.0, coherent_ref):
        warnings.warn(
            f"zero-mode asymptote {g1_coh:.3e} differs from |rho_0X|^2 "
            f"{coherent_ref:.3e}", RuntimeWarning, stacklevel=2)
    if tau_grid is None:
        decay_rates = -modes.eigenvalues.real
        nonzero = decay_rates[decay_rates > 0]
        slowest = float(np.min(nonzero)) if nonzero.size else None
        if gamma1 is None:
            gamma1 = slowest if slowest else 1.0
        tau_grid = default_tau_grid(gamma1, slowest)
    tau_grid = np.asarray(tau_grid, dtype=float)
    vals = np.exp(np.outer(tau_grid, modes.eigenvalues)) @ amps
    return CorrelationSeries(tau_grid=tau_grid, g1_values=vals,
                             g1_coh=float(g1_coh))


def check_density_matrix(rho, eig_floor=-1e-10):
    """Hermiticity/trace/positivity diagnostics used by the --check path."""
    herm = np.max(np.abs(rho - rho.conj().T))
    tr = abs(np.trace(rho) - 1.0)
    eigs = np.linalg.eigvalsh(hermitize(rho))
    return {
        "hermiticity_defect": float(herm),
        "trace_defect": float(tr),
        "min_eigenvalue": float(np.min(eigs)),
        "ok": bool(herm < HERMITICITY_TOL and tr < HERMITICITY_TOL
                   and np.min(eigs) >= eig_floor),
    }
