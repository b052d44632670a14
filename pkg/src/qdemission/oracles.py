"""Closed-form pure-dephasing expressions used to validate the full engine.

Everything here lives in the polaron limit F == 1 (weak resonant driving):
the driving-dependent dephasing rate gamma_PD and its thermal counterpart
kappa, the analytic g1 split into incoherent and coherent parts, the
thermalisation-corrected coherent fraction, the dressed Bloch generator, and
the sideband-width formulas.  These are computed through routes independent
of the dissipator module so the two can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SIGMA_M, SIGMA_X, SIGMA_Y, SIGMA_Z, commutator_superop, \
    hamiltonian_superop, lindblad_dissipator, spre, spost
from .params import PhysicalParams, inverse_temperature, spectral_density
from .quadrature import (DEFAULT_DECAY_TOL, DEFAULT_TAU_MAX, FrequencyGrid,
                         batched_half_line_fourier)

POLARON_F_TOL = 1e-3


class PolaronLimitError(ValueError):
    """Inputs are outside the polaron (F -> 1) validity regime."""


class UnsupportedRegimeError(ValueError):
    """Overdamped regime of the analytic g1; the closed form does not apply."""


@dataclass(frozen=True)
class PureDephasingRates:
    """Polaron-limit rates and shifts at one driving strength.

    gamma_pd     driving-dependent pure-dephasing rate (ps^-1)
    kappa        thermalisation rate, kappa/gamma_pd = tanh(beta Omega_r/2)
    lambda_shift dressed energy shift 2[S22(+) - S22(-)] (ps^-1)
    gamma_y      2 gamma_11(0) (ps^-1)
    gamma_z      gamma_22(+) + gamma_22(-), equals gamma_pd (ps^-1)
    gamma2       total coherence decay Gamma_1/2 + gamma_pd (ps^-1)
    zeta         oscillation frequency sqrt(Omega_r^2 - (Gamma_1-Gamma_2)^2/4)
    omega_r      polaron-renormalized Rabi frequency (ps^-1)
    b_factor     polaron renormalization Omega_r / Omega
    beta         inverse temperature (ps)
    """

    gamma_pd: float
    kappa: float
    lambda_shift: float
    gamma_y: float
    gamma_z: float
    gamma2: float
    zeta: float
    omega_r: float
    b_factor: float
    beta: float


def polaron_propagator(params: PhysicalParams, grid: FrequencyGrid):
    """phi(tau) with F == 1, returned as a vectorized callable."""
    beta = inverse_temperature(params)
    w = grid.nodes
    weights = grid.weights * spectral_density(w, params) / w**2
    n_occ = 1.0 / np.expm1(beta * w)

    def phi(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))[:, None]
        return np.sum(weights * ((n_occ + 1.0) * np.exp(-1j * w * tau)
                                 + n_occ * np.exp(1j * w * tau)), axis=-1)

    return phi


def gamma_pd(omega_r, phi, beta, tau_max=DEFAULT_TAU_MAX, tol=DEFAULT_DECAY_TOL):
    """Pure-dephasing rate (Omega_r/2)^2 int_-inf^inf cos(Omega_r s) h(s) ds.

    h(s) = e^phi - e^-phi; the symmetry phi(-s) = phi(s)* folds the integral
    onto the half line, leaving (Omega_r^2/4) Re[K(+) + K(-)] with
    K(w) = int_0^inf h(s) e^{iws} ds.
    """
    k_plus, k_minus = _h_transforms(omega_r, phi, beta, tau_max, tol)
    return float(omega_r**2 / 4.0 * (k_plus + k_minus).real)


def kappa(omega_r, phi, beta, tau_max=DEFAULT_TAU_MAX, tol=DEFAULT_DECAY_TOL):
    """Thermalisation rate, the odd-frequency counterpart of gamma_pd.

    The paper's full-line sine transform folds to (Omega_r^2/4) Re[K(+) -
    K(-)], the difference of downward and upward dressed transition rates;
    the sign convention makes kappa >= 0.
    """
    k_plus, k_minus = _h_transforms(omega_r, phi, beta, tau_max, tol)
    return float(omega_r**2 / 4.0 * (k_plus - k_minus).real)


def _h_transforms(omega_r, phi, beta, tau_max, tol):
    def h(tau):
        p = phi(tau)
        return np.exp(p) - np.exp(-p)

    h0 = max(float(np.abs(h(np.array([0.0]))[0])), 1e-300)
    vals, _, _ = batched_half_line_fourier(
        [h], [omega_r, -omega_r], tau_max=tau_max, tol=tol, beta=beta,
        scales=[h0], warn_label="polaron propagator")
    return vals[0, 0], vals[0, 1]


def polaron_rates(params: PhysicalParams, grid: FrequencyGrid, omega=None,
                  tau_max=DEFAULT_TAU_MAX, tol=DEFAULT_DECAY_TOL) -> PureDephasingRates:
    """All polaron-limit rates for driving strength omega (params.omega default).

    The renormalization here is the polaron one, B = exp[-phi(0)/2], which is
    independent of the driving; the analytic g1 formulas use this Omega_r.
    """
    if omega is None:
        omega = params.omega
    beta = inverse_temperature(params)
    phi = polaron_propagator(params, grid)
    phi0 = float(phi(np.array([0.0]))[0].real)
    b_factor = float(np.exp(-0.5 * phi0))
    omega_r = b_factor * omega

    def h_odd(tau):
        p = phi(tau)
        return np.exp(p) - np.exp(-p)

    def h_even(tau):
        p = phi(tau)
        return np.exp(p) + np.exp(-p) - 2.0

    scale_odd = max(float(np.abs(h_odd(np.array([0.0]))[0])), 1e-300)
    scale_even = max(float(np.abs(h_even(np.array([0.0]))[0])), 1e-300)
    vals, _, _ = batched_half_line_fourier(
        [h_odd, h_even], [omega_r, -omega_r, 0.0], tau_max=tau_max, tol=tol,
        beta=beta, scales=[scale_odd, scale_even], warn_label="polaron propagator")
    k22_plus = omega_r**2 / 8.0 * vals[0, 0]
    k22_minus = omega_r**2 / 8.0 * vals[0, 1]
    k11_zero = omega_r**2 / 8.0 * vals[1, 2]

    g22_plus, g22_minus = 2.0 * k22_plus.real, 2.0 * k22_minus.real
    gz = g22_plus + g22_minus
    kap = g22_plus - g22_minus
    lam = 2.0 * (k22_plus.imag - k22_minus.imag)
    gy = 2.0 * (2.0 * k11_zero.real)
    gamma2 = 0.5 * params.gamma1 + gz
    zeta_sq = omega_r**2 - 0.25 * (params.gamma1 - gamma2) ** 2
    zeta = float(np.sqrt(zeta_sq)) if zeta_sq >= 0 else float("nan")
    return PureDephasingRates(
        gamma_pd=float(gz), kappa=float(kap), lambda_shift=float(lam),
        gamma_y=float(gy), gamma_z=float(gz), gamma2=float(gamma2),
        zeta=zeta, omega_r=float(omega_r), b_factor=b_factor, beta=beta)


def require_polaron_limit(sol, tol=POLARON_F_TOL):
    """Refuse variational solutions outside the F -> 1 regime."""
    dev = float(np.max(np.abs(np.asarray(sol.f_values) - 1.0)))
    if dev > tol:
        raise PolaronLimitError(
            f"max|F - 1| = {dev:.3e} exceeds {tol:g}; the pure-dephasing "
            f"oracles only apply in the polaron limit")


def _eq2_coefficients(omega_r, gamma1, gamma_pd):
    g2 = 0.5 * gamma1 + gamma_pd
    zeta_sq = omega_r**2 - 0.25 * (gamma1 - g2) ** 2
    if zeta_sq <= 0:
        raise UnsupportedRegimeError(
            f"overdamped regime (zeta^2 = {zeta_sq:.3e} <= 0) is outside the "
            f"validity of the analytic g1")
    zeta = np.sqrt(zeta_sq)
    denom = 2.0 * omega_r**2 + 2.0 * gamma1 * g2
    coeff_n = (omega_r**2 - gamma1 * (gamma1 - g2)) / denom
    coeff_m = (omega_r**2 * (g2 - 3.0 * gamma1)
               + gamma1**3 * g2**2 * (1.0 / gamma1 - 1.0 / g2) ** 2) \
        / (4.0 * zeta * (omega_r**2 + gamma1 * g2))
    return g2, zeta, coeff_n, coeff_m, omega_r**2 / denom


def g1_inc_pd(tau, omega_r, gamma1, gamma_pd):
    """Analytic incoherent correlation of the pure-dephasing model."""
    g2, zeta, cn, cm, pref = _eq2_coefficients(omega_r, gamma1, gamma_pd)
    tau = np.asarray(tau, dtype=float)
    out = pref * (0.5 * np.exp(-g2 * tau)
                  + np.exp(-0.5 * (gamma1 + g2) * tau)
                  * (cn * np.cos(zeta * tau) - cm * np.sin(zeta * tau)))
    return out if out.ndim else float(out)


def g1_coh_pd(omega_r, gamma1, gamma_pd):
    """Analytic coherent fraction (Gamma_1 Omega_r / (2 Gamma_1 Gamma_2 + 2 Omega_r^2))^2."""
    g2 = 0.5 * gamma1 + gamma_pd
    return float((gamma1 * omega_r / (2.0 * gamma1 * g2 + 2.0 * omega_r**2)) ** 2)


def g1_coh_corrected(omega_r, omega, gamma1, gamma_pd, kappa):
    """Thermalisation-corrected coherent contribution.

    Adds the dressed-state equilibration term (Omega_r kappa / Omega /
    (Gamma_1 + 2 gamma_PD))^2 to the strict pure-dephasing value; the
    Omega_r/Omega weight is the variational-frame dipole renormalization of
    the thermal coherence.
    """
    return g1_coh_pd(omega_r, gamma1, gamma_pd) + \
        float((omega_r * kappa / omega / (gamma1 + 2.0 * gamma_pd)) ** 2)


def bloch_generator(rates: PureDephasingRates, omega_r):
    """Dressed Bloch equations d alpha/dt = M alpha + b (phonon part only)."""
    gy, gz, lam = rates.gamma_y, rates.gamma_z, rates.lambda_shift
    m = np.array([
        [-(gz - gy), 0.0, 0.0],
        [0.0, -gy, -omega_r],
        [0.0, omega_r + lam, -gz],
    ])
    b = np.array([-rates.kappa, 0.0, 0.0])
    return m, b


def pure_dephasing_liouvillian(omega_r, gamma1, gamma_pd, kappa=0.0):
    """Lindblad generator of the pure-dephasing model (resonant).

    -(i Omega_r/2)[sigma_x, .] + (gamma_pd/2)(sigma_z . sigma_z - .) +
    Gamma_1 D[sigma_-], optionally plus the thermalisation term
    (i kappa/4)[sigma_y, {sigma_z, .}].
    """
    liouv = hamiltonian_superop(0.5 * omega_r * SIGMA_X)
    liouv += 0.5 * gamma_pd * (np.kron(SIGMA_Z.conj(), SIGMA_Z) - np.eye(4))
    liouv += gamma1 * lindblad_dissipator(SIGMA_M)
    if kappa:
        liouv += 1j * kappa / 4.0 * (commutator_superop(SIGMA_Y)
                                     @ (spre(SIGMA_Z) + spost(SIGMA_Z)))
    return liouv


def sideband_width_resonant(gamma1, gamma_pd):
    """Resonant Mollow sideband FWHM (3/2) Gamma_1 + gamma_PD."""
    return 1.5 * gamma1 + gamma_pd


def sideband_width_detuned(gamma1, gamma_pd, epsilon, omega_r):
    """Second-order-in-detuning sideband FWHM.

    (3/2) Gamma_1 + gamma_PD - (epsilon / sqrt(2) Omega_r)^2 (Gamma_1 -
    2 gamma_PD): narrowing for Gamma_1 > 2 gamma_PD, broadening otherwise.
    """
    return sideband_width_resonant(gamma1, gamma_pd) \
        - (epsilon / (np.sqrt(2.0) * omega_r)) ** 2 * (gamma1 - 2.0 * gamma_pd)
