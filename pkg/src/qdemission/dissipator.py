"""Phonon contribution to the master equation.

Builds the full dissipator from the bath correlation functions of the
displaced-oscillator interaction terms, their half-line Fourier (response)
transforms evaluated at the dressed-state frequencies {0, +eta, -eta}, and
the frequency decomposition of the system coupling operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, commutator_superop, spre, spost
from .params import PhysicalParams, inverse_temperature, spectral_density
from .quadrature import (DEFAULT_DECAY_TOL, DEFAULT_TAU_MAX, FrequencyGrid,
                         batched_half_line_fourier)
from .variational import VariationalSolution

# (i, j) pairs with non-vanishing bath correlations; all others vanish
# identically (Lambda_12 = Lambda_21 = Lambda_13 = Lambda_31 = 0).
CORRELATION_PAIRS = ((1, 1), (2, 2), (3, 3), (3, 2), (2, 3))


@dataclass
class BathCorrelations:
    """Phonon propagator and bath correlation functions on demand.

    phi, lambda11, lambda22, lambda33, lambda32 are vectorized functions of
    tau (ps).  lambda23 is -lambda32.  k_table is filled by response_table.
    """

    phi: callable
    lambda11: callable
    lambda22: callable
    lambda33: callable
    lambda32: callable
    beta: float
    omega_r: float
    scales: dict = field(default_factory=dict)
    k_table: "ResponseTable | None" = None


@dataclass(frozen=True)
class DressedDecomposition:
    """Eigenstructure of (epsilon/2) sigma_z + (omega_r/2) sigma_x.

    eta is the dressed splitting sqrt(epsilon^2 + omega_r^2); this uses the
    renormalized Rabi frequency, not the bare one that enters the variational
    minimization.  a_ops maps (i, freq_tag) to the 2x2 frequency component of
    A_1 = sigma_x, A_2 = sigma_y, A_3 = (1/2)(I + sigma_z), with freq_tag in
    {"0", "+", "-"} labelling frequencies {0, +eta, -eta}.
    """

    eta: float
    theta: float
    a_ops: dict

    def a_full(self, i):
        return self.a_ops[(i, "0")] + self.a_ops[(i, "+")] + self.a_ops[(i, "-")]


def phonon_propagator(tau, sol: VariationalSolution, params: PhysicalParams,
                      grid: FrequencyGrid):
    """phi(tau) = int J/w^2 F^2 [(n+1) e^{-iw tau} + n e^{iw tau}] dw."""
    beta = inverse_temperature(params)
    w = grid.nodes
    weights = grid.weights * spectral_density(w, params) / w**2 * sol.f_values**2
    n_occ = 1.0 / np.expm1(beta * w)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))[:, None]
    g_plus = (n_occ + 1.0) * np.exp(-1j * w * tau) + n_occ * np.exp(1j * w * tau)
    out = np.sum(weights * g_plus, axis=-1)
    return out if out.size > 1 else complex(out[0])


def phonon_propagator_trig(tau, sol: VariationalSolution, params: PhysicalParams,
                           grid: FrequencyGrid):
    """Equivalent trigonometric form int J/w^2 F^2 [cos coth - i sin] dw."""
    beta = inverse_temperature(params)
    w = grid.nodes
    weights = grid.weights * spectral_density(w, params) / w**2 * sol.f_values**2
    tau = np.atleast_1d(np.asarray(tau, dtype=float))[:, None]
    vals = np.cos(w * tau) / np.tanh(beta * w / 2.0) - 1j * np.sin(w * tau)
    out = np.sum(weights * vals, axis=-1)
    return out if out.size > 1 else complex(out[0])


def correlation_functions(sol: VariationalSolution, params: PhysicalParams,
                          grid: FrequencyGrid) -> BathCorrelations:
    """Assemble the five non-vanishing bath correlation functions.

    Lambda_11 = (Omega_r^2/8)(e^phi + e^-phi - 2)      two-sided displacement
    Lambda_22 = (Omega_r^2/8)(e^phi - e^-phi)
    Lambda_33 = int J (1-F)^2 G_+ dw                    residual linear term
    Lambda_32 = (Omega_r/2) int J/w F(1-F) i G_- dw     cross term
    """
    beta = inverse_temperature(params)
    omega_r = sol.omega_r
    w = grid.nodes
    j = spectral_density(w, params)
    f = sol.f_values
    n_occ = 1.0 / np.expm1(beta * w)
    w_phi = grid.weights * j / w**2 * f**2
    w_33 = grid.weights * j * (1.0 - f) ** 2
    w_32 = grid.weights * j / w * f * (1.0 - f)

    def _gplus(tau):
        return ((n_occ + 1.0) * np.exp(-1j * w * tau[:, None])
                + n_occ * np.exp(1j * w * tau[:, None]))

    def phi(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return np.sum(w_phi * _gplus(tau), axis=-1)

    def lambda11(tau):
        p = phi(tau)
        return omega_r**2 / 8.0 * (np.exp(p) + np.exp(-p) - 2.0)

    def lambda22(tau):
        p = phi(tau)
        return omega_r**2 / 8.0 * (np.exp(p) - np.exp(-p))

    def lambda33(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return np.sum(w_33 * _gplus(tau), axis=-1)

    def lambda32(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        g_minus = ((n_occ + 1.0) * np.exp(-1j * w * tau[:, None])
                   - n_occ * np.exp(1j * w * tau[:, None]))
        return omega_r / 2.0 * np.sum(w_32 * 1j * g_minus, axis=-1)

    scales = {name: max(float(np.abs(fn(np.array([0.0]))[0])), 1e-300)
              for name, fn in (("11", lambda11), ("22", lambda22),
                               ("33", lambda33), ("32", lambda32))}
    return BathCorrelations(phi=phi, lambda11=lambda11, lambda22=lambda22,
                            lambda33=lambda33, lambda32=lambda32,
                            beta=beta, omega_r=omega_r, scales=scales)


@dataclass
class ResponseTable:
    """K_ij(w) at w in {0, +eta, -eta} for the non-vanishing (i, j) pairs.

    gamma(i, j, tag) = 2 Re K_ij, s_shift(i, j, tag) = Im K_ij, with tag in
    {"0", "+", "-"}.  decayed records which correlations dropped below the
    decay tolerance before tau_max.
    """

    eta: float
    values: dict
    decayed: dict
    tau_star: float

    def k(self, i, j, tag):
        if (i, j) == (2, 3):
            return -self.values[(3, 2, tag)]
        return self.values[(i, j, tag)]

    def gamma(self, i, j, tag):
        return 2.0 * self.k(i, j, tag).real

    def s_shift(self, i, j, tag):
        return self.k(i, j, tag).imag

    @property
    def all_decayed(self):
        return all(self.decayed.values())


def response_table(corr: BathCorrelations, eta, tau_max=DEFAULT_TAU_MAX,
                   decay_tol=DEFAULT_DECAY_TOL) -> ResponseTable:
    """Half-line Fourier transforms of the correlations at {0, +eta, -eta}.

    One shared panel sweep evaluates all four independent correlations and
    accumulates the twelve transforms; decay is judged relative to each
    correlation's tau = 0 magnitude.
    """
    names = ("11", "22", "33", "32")
    funcs = [corr.lambda11, corr.lambda22, corr.lambda33, corr.lambda32]
    # decay is judged against the largest correlation: a subdominant slow
    # tail only matters at the level it contributes to the superoperator
    common = max(corr.scales[n] for n in names)
    scales = np.full(len(names), common)
    ws = np.array([0.0, eta, -eta])
    vals, decayed, tau_star = batched_half_line_fourier(
        funcs, ws, tau_max=tau_max, tol=decay_tol, beta=corr.beta,
        scales=scales, warn_label="phonon response")
    values = {}
    dec = {}
    for k, name in enumerate(names):
        i, j = int(name[0]), int(name[1])
        dec[(i, j)] = bool(decayed[k])
        for m, tag in enumerate(("0", "+", "-")):
            values[(i, j, tag)] = complex(vals[k, m])
    table = ResponseTable(eta=float(eta), values=values, decayed=dec,
                          tau_star=float(tau_star))
    corr.k_table = table
    return table


def dressed_decomposition(epsilon, omega_r) -> DressedDecomposition:
    """Frequency components of A_i in the dressed eigenbasis.

    |+> = cos(theta)|X> + sin(theta)|0>, |-> = -sin(theta)|X> + cos(theta)|0>
    with theta = (1/2) arctan2(omega_r, epsilon), eigenvalues +-eta/2.
    A_i(0) keeps the diagonal blocks, A_i(+eta) = P_- A_i P_+, and
    A_i(-eta) = A_i(+eta)^dag.
    """
    eta = float(np.hypot(epsilon, omega_r))
    theta = 0.5 * np.arctan2(omega_r, epsilon)
    # basis order (|0>, |X>)
    plus = np.array([np.sin(theta), np.cos(theta)], dtype=complex)
    minus = np.array([np.cos(theta), -np.sin(theta)], dtype=complex)
    p_plus = np.outer(plus, plus.conj())
    p_minus = np.outer(minus, minus.conj())
    bare = {1: SIGMA_X, 2: SIGMA_Y, 3: 0.5 * (IDENTITY + SIGMA_Z)}
    a_ops = {}
    for i, a in bare.items():
        a_ops[(i, "0")] = p_plus @ a @ p_plus + p_minus @ a @ p_minus
        a_ops[(i, "+")] = p_minus @ a @ p_plus
        a_ops[(i, "-")] = p_plus @ a @ p_minus
    return DressedDecomposition(eta=eta, theta=float(theta), a_ops=a_ops)


def build_kph(sol: VariationalSolution, table: ResponseTable,
              decomp: DressedDecomposition) -> np.ndarray:
    """Assemble the 4x4 phonon superoperator.

    K_ph(rho) = -1/2 sum_{ij,w} gamma_ij(w) [A_i, A_j(w) rho - rho A_j(w)^dag]
                - i  sum_{ij,w} S_ij(w)     [A_i, A_j(w) rho + rho A_j(w)^dag]

    Trace annihilation is structural (everything sits inside a commutator
    with A_i); hermiticity preservation follows from the correlation
    symmetries and is covered by tests rather than enforced here.
    """
    if abs(table.eta - decomp.eta) > 1e-9 * max(1.0, decomp.eta):
        raise ValueError(
            f"response table (eta={table.eta:.6g}) and dressed decomposition "
            f"(eta={decomp.eta:.6g}) come from different solutions")
    bare = {1: SIGMA_X, 2: SIGMA_Y, 3: 0.5 * (IDENTITY + SIGMA_Z)}
    k_super = np.zeros((4, 4), dtype=complex)
    for (i, j) in CORRELATION_PAIRS:
        comm_i = commutator_superop(bare[i])
        for tag in ("0", "+", "-"):
            a_jw = decomp.a_ops[(j, tag)]
            a_jw_dag = a_jw.conj().T
            kij = table.k(i, j, tag)
            gamma = 2.0 * kij.real
            s_val = kij.imag
            k_super += comm_i @ (-0.5 * gamma * (spre(a_jw) - spost(a_jw_dag))
                                 - 1j * s_val * (spre(a_jw) + spost(a_jw_dag)))
    return k_super


def build_phonon_superoperator(sol: VariationalSolution, params: PhysicalParams,
                               grid: FrequencyGrid, tau_max=DEFAULT_TAU_MAX,
                               decay_tol=DEFAULT_DECAY_TOL):
    """Convenience chain: correlations -> response table -> K_ph.

    Returns (k_super, corr, decomp); k_super is the zero matrix when the
    coupling vanishes.
    """
    decomp = dressed_decomposition(sol.epsilon, sol.omega_r)
    if params.alpha == 0.0:
        return np.zeros((4, 4), dtype=complex), None, decomp
    corr = correlation_functions(sol, params, grid)
    table = response_table(corr, decomp.eta, tau_max=tau_max, decay_tol=decay_tol)
    return build_kph(sol, table, decomp), corr, decomp
