import numpy as np
import pytest

from qdemission import FrequencyGrid, half_line_fourier, integrate_frequency
from qdemission.quadrature import QuadratureError, batched_half_line_fourier


def test_grid_invariants():
    grid = FrequencyGrid.for_cutoff(2.2)
    assert np.all(grid.nodes > 0)
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.weights > 0)
    assert grid.nodes[-1] >= 10 * 2.2
    assert len(grid) == 400


def test_grid_rejects_bad_construction():
    with pytest.raises(ValueError):
        FrequencyGrid(nodes=np.array([1.0, 0.5]), weights=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        FrequencyGrid.for_cutoff(2.2, upper_factor=5.0)


def test_integrate_cubic_gaussian():
    # int_0^inf w^3 exp(-w^2) dw = 1/2
    grid = FrequencyGrid.for_cutoff(1.0)
    val = integrate_frequency(lambda w: w**3 * np.exp(-(w**2)), grid)
    assert val == pytest.approx(0.5, rel=1e-12)


def test_integrate_linear_gaussian():
    # int_0^inf w exp(-w^2) dw = 1/2
    grid = FrequencyGrid.for_cutoff(1.0)
    val = integrate_frequency(lambda w: w * np.exp(-(w**2)), grid)
    assert val == pytest.approx(0.5, rel=1e-12)


def test_integrate_zero_function():
    grid = FrequencyGrid.for_cutoff(1.0)
    assert integrate_frequency(lambda w: np.zeros_like(w), grid) == 0.0


def test_integrate_reports_offending_node():
    grid = FrequencyGrid.for_cutoff(1.0)
    bad = grid.nodes[137]

    def f(w):
        out = np.ones_like(w)
        out[w == bad] = np.nan
        return out

    with pytest.raises(QuadratureError, match=f"{bad:.6g}"):
        integrate_frequency(f, grid)


def test_doubling_nodes_stability():
    # doubling the node count moves a smooth integral by < 10x the
    # advertised tolerance (1e-10 relative)
    f = lambda w: w**3 * np.exp(-((w / 2.2) ** 2)) * np.cos(3.0 * w)
    a = integrate_frequency(f, FrequencyGrid.for_cutoff(2.2, n=400))
    b = integrate_frequency(f, FrequencyGrid.for_cutoff(2.2, n=800))
    assert abs(a - b) <= 1e-9 * max(abs(a), 1.0)


def test_half_line_fourier_laplace():
    gamma = 0.7
    res = half_line_fourier(lambda t: np.exp(-gamma * t), 0.0)
    assert res.decayed
    assert res.value == pytest.approx(1.0 / gamma, rel=1e-10)


def test_half_line_fourier_complex_pole():
    # int_0^inf e^{-g t} e^{i w t} dt = 1/(g - i w)
    gamma, w = 0.9, 2.3
    res = half_line_fourier(lambda t: np.exp(-gamma * t), w)
    expected = 1.0 / (gamma - 1j * w)
    assert res.value == pytest.approx(expected, rel=1e-10)
    assert res.value.real == pytest.approx(gamma / (gamma**2 + w**2), rel=1e-9)
    assert res.value.imag == pytest.approx(w / (gamma**2 + w**2), rel=1e-9)


def test_half_line_fourier_zero_function():
    res = half_line_fourier(lambda t: np.zeros_like(t), 1.0)
    assert res.value == 0.0
    assert res.decayed


def test_half_line_fourier_conjugate_symmetry():
    # for real g the transforms at +w and -w are complex conjugates, which
    # is what makes gamma(-w) relations hold downstream
    g = lambda t: np.exp(-0.5 * t) * np.cos(1.3 * t)
    plus = half_line_fourier(g, 1.7).value
    minus = half_line_fourier(g, -1.7).value
    assert plus == pytest.approx(np.conj(minus), rel=1e-12)


def test_half_line_fourier_nondecay_flag():
    res = half_line_fourier(lambda t: np.exp(-1e-4 * t), 0.0, tau_max=5.0)
    assert not res.decayed
    assert "tau_max" in res.message


def test_half_line_fourier_step_refines_with_frequency():
    # a fast oscillation against a slow decay still integrates accurately
    gamma, w = 0.05, 40.0
    res = half_line_fourier(lambda t: np.exp(-gamma * t), w, tau_max=400.0)
    assert res.value == pytest.approx(1.0 / (gamma - 1j * w), rel=1e-8)


def test_batched_matches_single(recwarn):
    gamma = 0.8
    g = lambda t: np.exp(-gamma * t) * (1.0 + 0.2j)
    ws = [0.0, 1.1, -1.1]
    vals, decayed, _ = batched_half_line_fourier([g], ws)
    assert np.all(decayed)
    for w, v in zip(ws, vals[0]):
        single = half_line_fourier(g, w)
        assert v == pytest.approx(single.value, rel=1e-12)


def test_batched_flags_nondecay():
    _, decayed, tau_star = batched_half_line_fourier(
        [lambda t: np.ones_like(t)], [0.5], tau_max=2.0)
    assert not decayed[0]
    assert tau_star == pytest.approx(2.0, rel=0.3)
