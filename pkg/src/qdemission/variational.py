"""Self-consistent variational displacement factor F(omega).

The per-mode displacement fraction F(omega), the renormalized Rabi frequency
Omega_r = Omega * B and the shifted detuning epsilon = nu + R all depend on
each other; a damped fixed-point iteration starting from the polaron limit
F == 1 converges to the joint solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import PhysicalParams, inverse_temperature, spectral_density
from .quadrature import FrequencyGrid

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 500


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge."""

    def __init__(self, message, residual, history):
        super().__init__(f"{message} (last residual {residual:.3e}, "
                         f"{len(history)} iterates recorded)")
        self.residual = residual
        self.history = history


@dataclass(frozen=True)
class VariationalSolution:
    """Converged F(omega) on the quadrature grid plus derived scalars.

    f_values   F(omega_i) per grid node, in [0, 1]
    omega_r    renormalized Rabi frequency (ps^-1)
    epsilon    shifted detuning nu + R (ps^-1)
    b_factor   Omega_r / Omega (1.0 by convention when Omega == 0)
    r_shift    integral J/omega * F(F-2), always <= 0 (ps^-1)
    residual   final fixed-point residual
    history    per-iteration residuals (length == iteration count)
    """

    f_values: np.ndarray
    omega_r: float
    epsilon: float
    b_factor: float
    r_shift: float
    residual: float
    history: tuple = field(default=(), compare=False)


def _coth(x):
    return 1.0 / np.tanh(x)


def f_of_omega(w, epsilon, omega_r, omega, beta):
    """Variational factor F at frequency w (scalar or array, w > 0).

    The closed form contains an (epsilon/xi) * (Omega_r^2 / 2 epsilon w)
    product; expanding it before dividing removes the 0/0 at epsilon = 0, so
    one expression covers resonant and detuned driving:

        F = N / (N + tanh(beta xi/2)/xi * Omega_r^2 coth(beta w/2) / (2 w))

    with N = 1 - (epsilon/xi) tanh(beta xi/2) and xi = sqrt(epsilon^2 +
    Omega^2) using the bare Rabi frequency.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError("f_of_omega requires w > 0")
    xi = np.hypot(epsilon, omega)
    # tanh(beta*xi/2)/xi -> beta/2 as xi -> 0
    t_over_xi = beta / 2.0 if xi == 0 else np.tanh(beta * xi / 2.0) / xi
    numer = 1.0 - epsilon * t_over_xi
    c = t_over_xi * omega_r**2 * _coth(beta * w / 2.0) / (2.0 * w)
    out = numer / (numer + c)
    return out if out.ndim else float(out)


def renormalized_rabi(f_values, omega, beta, grid: FrequencyGrid,
                      params: PhysicalParams) -> float:
    """Omega_r = Omega * exp[-1/2 int J/w^2 F^2 coth(beta w/2) dw]."""
    j = spectral_density(grid.nodes, params)
    exponent = np.sum(grid.weights * j / grid.nodes**2 * np.asarray(f_values) ** 2
                      * _coth(beta * grid.nodes / 2.0))
    if not np.isfinite(exponent):
        raise ValueError("renormalization exponent is not finite")
    return omega * np.exp(-0.5 * exponent)


def shifted_detuning(f_values, nu, grid: FrequencyGrid,
                     params: PhysicalParams) -> float:
    """epsilon = nu + int J/w * F(F-2) dw; the shift is never positive."""
    f = np.asarray(f_values)
    j = spectral_density(grid.nodes, params)
    r = np.sum(grid.weights * j / grid.nodes * f * (f - 2.0))
    return nu + r


def polaron_shift(params: PhysicalParams, grid: FrequencyGrid) -> float:
    """Full polaron shift int J/w dw (the F == 1 limit of -R)."""
    j = spectral_density(grid.nodes, params)
    return float(np.sum(grid.weights * j / grid.nodes))


def resonant_nu(params: PhysicalParams, grid: FrequencyGrid) -> float:
    """Detuning nu at which the polaron-limit (F -> 1) epsilon vanishes."""
    return polaron_shift(params, grid)


def solve_self_consistent(params: PhysicalParams, grid: FrequencyGrid,
                          tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                          fixed_epsilon=None) -> VariationalSolution:
    """Damped fixed-point solve of (F, Omega_r, epsilon).

    Starts from the polaron limit F == 1 (exact for weak driving) and damps
    the update by 0.5 whenever the residual fails to decrease.  The residual
    is max(|d Omega_r|/Omega, |d epsilon| * beta, max|dF|).

    With fixed_epsilon set, epsilon is held at that value and only (F,
    Omega_r) iterate; the implied nu is epsilon - R.  This is how detuning
    sweeps pin the master-equation detuning directly.
    """
    beta = inverse_temperature(params)
    omega = params.omega

    if params.alpha == 0.0:
        # no coupling: F is irrelevant, set to 0 by convention
        eps = params.nu if fixed_epsilon is None else fixed_epsilon
        return VariationalSolution(
            f_values=np.zeros(len(grid)), omega_r=omega, epsilon=eps,
            b_factor=1.0, r_shift=0.0, residual=0.0, history=(0.0,))

    f = np.ones(len(grid))
    omega_r = renormalized_rabi(f, omega, beta, grid, params)
    eps = fixed_epsilon if fixed_epsilon is not None else \
        shifted_detuning(f, params.nu, grid, params)

    history = []
    damping = 1.0
    prev_res = np.inf
    scale_omega = omega if omega > 0 else 1.0
    for _ in range(int(max_iter)):
        f_new = f_of_omega(grid.nodes, eps, omega_r, omega, beta)
        omega_r_new = renormalized_rabi(f_new, omega, beta, grid, params)
        eps_new = eps if fixed_epsilon is not None else \
            shifted_detuning(f_new, params.nu, grid, params)
        res = max(abs(omega_r_new - omega_r) / scale_omega,
                  abs(eps_new - eps) * beta,
                  float(np.max(np.abs(f_new - f))))
        if res > prev_res:
            damping = 0.5
        f = f + damping * (f_new - f)
        omega_r = omega_r + damping * (omega_r_new - omega_r)
        eps = eps + damping * (eps_new - eps)
        prev_res = res
        history.append(res)
        if res < tol:
            break
    else:
        raise ConvergenceError("variational fixed point did not converge",
                               res, history)

    r = shifted_detuning(f, 0.0, grid, params)
    nu_eff = eps - r if fixed_epsilon is not None else params.nu
    return VariationalSolution(
        f_values=f, omega_r=float(omega_r),
        epsilon=float(nu_eff + r),
        b_factor=float(omega_r / omega) if omega > 0 else 1.0,
        r_shift=float(r), residual=float(res), history=tuple(history))
