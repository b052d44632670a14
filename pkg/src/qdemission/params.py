"""Physical parameters, unit conventions, and the phonon spectral density.

Unit system: hbar = 1, all energies and frequencies are angular frequencies
in ps^-1, times in ps, the coupling constant alpha in ps^2, temperature in
kelvin.  The Boltzmann-over-hbar ratio used for the thermal time scale is
hard-coded below from CODATA values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# k_B / hbar = 1.380649e-23 / 1.054571817e-34 s^-1 K^-1, to six figures
K_RATIO = 0.130920  # ps^-1 K^-1


@dataclass(frozen=True)
class PhysicalParams:
    """All experiment inputs with fixed units.

    nu          bare laser detuning omega_0 - omega_l (ps^-1)
    omega       bare Rabi frequency (ps^-1)
    alpha       phonon coupling strength (ps^2)
    omega_c     phonon cutoff frequency (ps^-1)
    temperature bath temperature (K)
    gamma1      spontaneous-emission rate 1/T_1 (ps^-1)
    """

    nu: float
    omega: float
    alpha: float
    omega_c: float
    temperature: float
    gamma1: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.gamma1 <= 0:
            raise ValueError(f"gamma1 must be > 0, got {self.gamma1}")


def spectral_density(w, params: PhysicalParams):
    """Super-ohmic phonon coupling density alpha * w^3 * exp[-(w/omega_c)^2].

    Accepts scalar or array w >= 0; returns coupling density in ps^-1.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("spectral_density requires w >= 0")
    out = params.alpha * w**3 * np.exp(-((w / params.omega_c) ** 2))
    return out if out.ndim else float(out)


def inverse_temperature(params: PhysicalParams) -> float:
    """Thermal time beta = 1/(k_B T / hbar) in ps."""
    if params.temperature <= 0:
        raise ValueError("temperature must be > 0")
    return 1.0 / (K_RATIO * params.temperature)
