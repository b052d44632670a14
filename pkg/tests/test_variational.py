import numpy as np
import pytest
from scipy.integrate import quad

from qdemission import (ConvergenceError, FrequencyGrid, PhysicalParams,
                        f_of_omega, inverse_temperature, renormalized_rabi,
                        resonant_nu, shifted_detuning, solve_self_consistent)

FIG1 = dict(nu=0.0, omega=0.1, alpha=0.027, omega_c=2.2, temperature=4.0,
            gamma1=1.0 / 700.0)


def make_params(**kw):
    return PhysicalParams(**{**FIG1, **kw})


@pytest.fixture(scope="module")
def grid():
    return FrequencyGrid.for_cutoff(2.2)


# --- f_of_omega -------------------------------------------------------------

def test_f_polaron_limit_at_vanishing_drive():
    # Omega_r -> 0: displacement factor is 1 at every frequency
    w = np.geomspace(1e-3, 20.0, 40)
    f = f_of_omega(w, epsilon=0.0, omega_r=0.0, omega=0.0, beta=1.9)
    assert np.allclose(f, 1.0)


def test_f_high_frequency_limit():
    f = f_of_omega(1e6, epsilon=0.0, omega_r=1.0, omega=1.0, beta=1.9)
    assert f == pytest.approx(1.0, abs=1e-5)


def test_f_resonant_reference_value():
    # at epsilon=0, Omega=Omega_r=1, beta=1, w=1 the limit formula gives
    # 1/(1 + tanh(1/2) coth(1/2) / 2) = 2/3 since tanh(x) coth(x) = 1
    val = f_of_omega(1.0, epsilon=0.0, omega_r=1.0, omega=1.0, beta=1.0)
    assert val == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_f_resonant_limit_matches_small_epsilon():
    # the epsilon -> 0 algebraic limit agrees with the closed form evaluated
    # at epsilon = 1e-8
    w = np.geomspace(1e-2, 10.0, 25)
    at_zero = f_of_omega(w, 0.0, 0.8, 1.0, 1.9)
    near_zero = f_of_omega(w, 1e-8, 0.8, 1.0, 1.9)
    assert np.max(np.abs(at_zero - near_zero)) < 1e-6


def test_f_bounded_for_signed_detuning():
    w = np.geomspace(1e-3, 25.0, 60)
    for eps in (-2.0, -0.3, 0.0, 0.3, 2.0):
        f = f_of_omega(w, eps, 0.7, 1.0, 0.8)
        assert np.all(f >= 0.0) and np.all(f <= 1.0)


def test_f_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        f_of_omega(0.0, 0.0, 1.0, 1.0, 1.0)


# --- renormalized_rabi / shifted_detuning ------------------------------------

def test_rabi_unrenormalized_without_coupling(grid):
    p = make_params(alpha=0.0)
    f = np.ones(len(grid))
    beta = inverse_temperature(p)
    assert renormalized_rabi(f, 1.0, beta, grid, p) == pytest.approx(1.0)


def test_rabi_unrenormalized_at_zero_displacement(grid):
    p = make_params()
    beta = inverse_temperature(p)
    assert renormalized_rabi(np.zeros(len(grid)), 1.0, beta, grid, p) == \
        pytest.approx(1.0)


def test_rabi_polaron_factor_against_adaptive_quadrature(grid):
    # F == 1: B = exp[-1/2 int J/w^2 coth(beta w/2) dw], cross-checked with
    # an independent scipy quadrature of the same integrand
    p = make_params()
    beta = inverse_temperature(p)
    integrand = lambda w: (p.alpha * w * np.exp(-((w / p.omega_c) ** 2))
                           / np.tanh(beta * w / 2.0))
    ref = np.exp(-0.5 * quad(integrand, 0.0, np.inf, limit=200)[0])
    val = renormalized_rabi(np.ones(len(grid)), 1.0, beta, grid, p)
    assert val == pytest.approx(ref, rel=1e-8)


def test_detuning_unshifted_for_zero_displacement(grid):
    p = make_params()
    assert shifted_detuning(np.zeros(len(grid)), 0.4, grid, p) == \
        pytest.approx(0.4)


def test_detuning_full_polaron_shift_both_ways(grid):
    # F == 1: epsilon = nu - int J/w dw; the integral has the closed form
    # alpha * omega_c^3 * sqrt(pi)/4 for the Gaussian cutoff
    p = make_params()
    shift_quad = quad(lambda w: p.alpha * w**2 * np.exp(-((w / p.omega_c) ** 2)),
                      0.0, np.inf)[0]
    shift_analytic = p.alpha * p.omega_c**3 * np.sqrt(np.pi) / 4.0
    assert shift_quad == pytest.approx(shift_analytic, rel=1e-12)
    val = shifted_detuning(np.ones(len(grid)), 0.0, grid, p)
    assert val == pytest.approx(-shift_analytic, rel=1e-10)
    assert resonant_nu(p, grid) == pytest.approx(shift_analytic, rel=1e-10)


def test_shift_never_positive(grid):
    p = make_params()
    rng = np.random.default_rng(3)
    for _ in range(10):
        f = rng.uniform(0.0, 1.0, len(grid))
        assert shifted_detuning(f, 0.0, grid, p) <= 0.0


# --- solve_self_consistent ----------------------------------------------------

def test_solve_trivial_without_coupling(grid):
    p = make_params(alpha=0.0, nu=0.3, omega=1.2)
    sol = solve_self_consistent(p, grid)
    assert sol.omega_r == 1.2
    assert sol.epsilon == 0.3
    assert len(sol.history) == 1


def test_solve_polaron_limit_weak_drive(grid):
    # Omega -> 0 at the polaron-shifted resonance: F -> 1, epsilon -> 0.
    # F(w) -> 0 at any finite drive for w << Omega_r, so uniform closeness
    # over the grid needs Omega well below the lowest node.
    p = make_params(omega=1e-6)
    p = PhysicalParams(**{**FIG1, "omega": 1e-6, "nu": resonant_nu(p, grid)})
    sol = solve_self_consistent(p, grid)
    assert np.max(np.abs(sol.f_values - 1.0)) < 1e-4
    assert abs(sol.epsilon) < 1e-8


def test_solve_weak_drive_matches_polaron_renormalization(grid):
    # the residual F < 1 band below the Rabi frequency shrinks linearly with
    # the driving, so Omega_r/Omega converges to the polaron B factor
    p0 = make_params()
    nu = resonant_nu(p0, grid)
    beta = inverse_temperature(p0)
    b_pol = renormalized_rabi(np.ones(len(grid)), 1.0, beta, grid, p0)
    deviations = []
    for omega in (0.05, 0.01, 0.002):
        p = PhysicalParams(**{**FIG1, "omega": omega, "nu": nu})
        sol = solve_self_consistent(p, grid)
        deviations.append(abs(sol.omega_r / omega - b_pol))
    assert deviations[0] < 2e-3
    assert deviations[1] < deviations[0]
    assert deviations[2] < 1e-4


def test_solution_invariants_across_drivings(grid):
    p0 = make_params()
    nu = resonant_nu(p0, grid)
    beta = inverse_temperature(p0)
    for omega in (0.05, 0.3, 1.0, 4.0):
        p = PhysicalParams(**{**FIG1, "omega": omega, "nu": nu})
        sol = solve_self_consistent(p, grid)
        assert np.all(sol.f_values >= 0.0) and np.all(sol.f_values <= 1.0)
        assert 0.0 < sol.omega_r <= omega
        assert sol.r_shift <= 0.0
        # stored scalars satisfy their defining relations at the stored F
        assert renormalized_rabi(sol.f_values, omega, beta, grid, p) == \
            pytest.approx(sol.omega_r, abs=2e-10 * omega)
        assert shifted_detuning(sol.f_values, nu, grid, p) == \
            pytest.approx(sol.epsilon, abs=2e-10 / beta)


def test_solution_is_fixed_point(grid):
    # re-applying the map to a converged solution changes nothing beyond
    # the residual tolerance
    p0 = make_params()
    p = PhysicalParams(**{**FIG1, "omega": 1.0, "nu": resonant_nu(p0, grid)})
    sol = solve_self_consistent(p, grid)
    beta = inverse_temperature(p)
    f_new = f_of_omega(grid.nodes, sol.epsilon, sol.omega_r, p.omega, beta)
    assert np.max(np.abs(f_new - sol.f_values)) < 1e-9


def test_limit_alpha_to_zero_is_linear(grid):
    # Omega_r -> Omega and epsilon -> nu linearly in alpha
    p0 = make_params()
    nu = resonant_nu(p0, grid)  # fixed nu, not rescaled with alpha
    devs = []
    alphas = (0.004, 0.002, 0.001)
    for a in alphas:
        p = PhysicalParams(**{**FIG1, "omega": 0.5, "nu": 0.05, "alpha": a})
        sol = solve_self_consistent(p, grid)
        devs.append((0.5 - sol.omega_r, 0.05 - sol.epsilon))
    for i in range(len(alphas) - 1):
        ratio = alphas[i] / alphas[i + 1]
        assert devs[i][0] / devs[i + 1][0] == pytest.approx(ratio, rel=0.02)
        assert devs[i][1] / devs[i + 1][1] == pytest.approx(ratio, rel=0.02)


def test_fixed_epsilon_solve(grid):
    p = make_params(omega=0.025, temperature=10.0)
    target = 0.0125
    sol = solve_self_consistent(p, grid, fixed_epsilon=target)
    assert sol.epsilon == pytest.approx(target, abs=1e-12)
    # the implied nu reproduces epsilon through the standard relation
    assert sol.epsilon == pytest.approx(
        (target - sol.r_shift) + sol.r_shift, abs=1e-12)


def test_convergence_error_reports_history(grid):
    p = make_params(omega=1.0)
    with pytest.raises(ConvergenceError) as err:
        solve_self_consistent(p, grid, max_iter=2)
    assert err.value.residual > 0
    assert len(err.value.history) == 2
