"""Incoherent emission spectrum and Mollow-triplet observables.

The spectrum is a closed-form sum of complex Lorentzians over the
Liouvillian modes (the zero mode, i.e. the coherent delta component, is
excluded and reported separately as g1_coh).  Triplet observables come from
a three-Lorentzian least-squares fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .dynamics import decompose, _mode_amplitudes
from .operators import SIGMA_P

DEFAULT_OMEGA_POINTS = 4001
DEFAULT_SPAN_FACTOR = 3.0
FIT_RESIDUAL_LIMIT = 0.05


class FitError(RuntimeError):
    """Triplet fit failed; diagnostics attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class SpectrumSeries:
    """Incoherent spectrum samples on a detuning axis (omega - omega_l)."""

    omega_grid: np.ndarray
    s_values: np.ndarray


@dataclass(frozen=True)
class LorentzianPeak:
    position: float
    fwhm: float
    amplitude: float


@dataclass(frozen=True)
class TripletFit:
    """Three fitted Lorentzians ordered red, central, blue."""

    peaks: tuple
    splitting: float
    fit_residual: float

    @property
    def red(self):
        return self.peaks[0]

    @property
    def central(self):
        return self.peaks[1]

    @property
    def blue(self):
        return self.peaks[2]


def default_omega_grid(eta, gamma1=None, n=DEFAULT_OMEGA_POINTS,
                       span_factor=DEFAULT_SPAN_FACTOR):
    """Symmetric detuning grid covering the triplet, [-3 eta, +3 eta].

    Falls back to a Gamma_1-based span when the dressed splitting is too
    small to set a scale (undriven or barely driven points).
    """
    span = span_factor * eta
    if gamma1 is not None:
        span = max(span, 20.0 * gamma1)
    if span <= 0:
        raise ValueError("cannot build an omega grid with zero span")
    return np.linspace(-span, span, int(n))


def incoherent_spectrum(liouv, rho_ss, omega_grid) -> SpectrumSeries:
    """S(w) = (1/pi) sum_k Re[a_k / (-l_k - i w)], zero mode excluded."""
    modes = decompose(np.asarray(liouv, dtype=complex))
    amps = _mode_amplitudes(modes, np.asarray(rho_ss) @ SIGMA_P)
    omega_grid = np.asarray(omega_grid, dtype=float)
    s = np.zeros_like(omega_grid)
    for k in range(amps.size):
        if k == modes.zero_index:
            continue
        s += (amps[k] / (-modes.eigenvalues[k] - 1j * omega_grid)).real
    return SpectrumSeries(omega_grid=omega_grid, s_values=s / np.pi)


def lorentzian(omega, position, fwhm, amplitude=1.0):
    """amplitude * 0.5 gamma / ((w - w_p)^2 + (0.5 gamma)^2)."""
    half = 0.5 * fwhm
    return amplitude * half / ((omega - position) ** 2 + half**2)


def _local_maxima(s):
    return np.nonzero((s[1:-1] > s[:-2]) & (s[1:-1] > s[2:]))[0] + 1


def _initial_guess(spec: SpectrumSeries):
    """Peak positions from the three largest local maxima, widths from
    half-maximum crossings, amplitudes from peak heights."""
    om, s = spec.omega_grid, spec.s_values
    idx = _local_maxima(s)
    floor = max(np.max(np.abs(np.minimum(s, 0.0))), 1e-12 * np.max(s))
    idx = idx[s[idx] > 3.0 * floor]
    if idx.size < 3:
        raise FitError(
            "fewer than three resolvable peaks in the spectrum",
            {"n_peaks": int(idx.size), "noise_floor": float(floor)})
    top = idx[np.argsort(s[idx])[-3:]]
    top = np.sort(top)
    guesses = []
    for i in top:
        half = s[i] / 2.0
        lo = i
        while lo > 0 and s[lo] > half:
            lo -= 1
        hi = i
        while hi < s.size - 1 and s[hi] > half:
            hi += 1
        fwhm = max(om[hi] - om[lo], om[1] - om[0])
        guesses.append((om[i], fwhm, s[i] * fwhm / 2.0))
    return guesses


def fit_triplet(spec: SpectrumSeries, init=None) -> TripletFit:
    """Damped least-squares fit of three Lorentzians.

    init, when given, is a sequence of three (position, fwhm, amplitude)
    triples; otherwise guesses are read off the spectrum.  Raises FitError
    for unresolvable peaks, non-convergence, or relative RMS residual above
    the acceptance limit.
    """
    if init is None:
        init = _initial_guess(spec)
    if len(init) != 3:
        raise FitError(f"need exactly 3 initial peaks, got {len(init)}")
    om, s = spec.omega_grid, spec.s_values
    scale = np.max(s)

    def model(p):
        return sum(lorentzian(om, p[3 * k], p[3 * k + 1], p[3 * k + 2])
                   for k in range(3))

    def resid(p):
        return (model(p) - s) / scale

    p0 = np.array([v for peak in init for v in peak], dtype=float)
    sol = least_squares(resid, p0, method="lm", xtol=1e-8, ftol=1e-12,
                        max_nfev=200 * p0.size)
    if not sol.success:
        raise FitError(f"triplet fit did not converge: {sol.message}",
                       {"status": sol.status, "cost": float(sol.cost)})
    params = sol.x.reshape(3, 3)
    params[:, 1] = np.abs(params[:, 1])
    order = np.argsort(params[:, 0])
    peaks = tuple(LorentzianPeak(position=float(p[0]), fwhm=float(p[1]),
                                 amplitude=float(p[2])) for p in params[order])
    residual = float(np.sqrt(np.mean((model(sol.x) - s) ** 2)) / scale)
    if residual > FIT_RESIDUAL_LIMIT:
        raise FitError(f"fit residual {residual:.3g} above "
                       f"{FIT_RESIDUAL_LIMIT}", {"residual": residual})
    return TripletFit(peaks=peaks,
                      splitting=float(peaks[2].position - peaks[0].position),
                      fit_residual=residual)


def extract_observables(fit: TripletFit):
    """Scalar sweep observables: (splitting, red, blue, central FWHM)."""
    return (fit.splitting, fit.red.fwhm, fit.blue.fwhm, fit.central.fwhm)
