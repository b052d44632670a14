"""Numerical integration primitives.

Two kinds of integrals appear throughout: frequency-domain integrals over
[0, inf) against the Gaussian-cutoff spectral density, and half-line Fourier
integrals of decaying time correlation functions.  Both use composite
Gauss-Legendre rules; the frequency grid is fixed so that variational factors
can be stored per node during self-consistent iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_NODES = 400
DEFAULT_UPPER_FACTOR = 12.0
DEFAULT_TAU_MAX = 50.0  # ps; phonon correlations decay within a few ps
DEFAULT_DECAY_TOL = 1e-12
DEFAULT_MAX_STEP = 0.05  # ps

_PANEL_NODES = 10


class QuadratureError(RuntimeError):
    """Non-finite integrand or invalid quadrature request."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Gauss-Legendre nodes/weights on [0, upper_factor * omega_c].

    All nodes are interior, hence strictly positive; integrands only need to
    be finite on (0, inf).  The Gaussian cutoff makes the tail above the
    upper edge negligible.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be matching 1-d arrays")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing and positive")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def for_cutoff(cls, omega_c, n=DEFAULT_NODES, upper_factor=DEFAULT_UPPER_FACTOR):
        if omega_c <= 0:
            raise ValueError("omega_c must be > 0")
        if upper_factor < 10.0:
            raise ValueError("grid must extend to at least 10 * omega_c")
        x, w = np.polynomial.legendre.leggauss(int(n))
        half = 0.5 * upper_factor * omega_c
        return cls(nodes=half * (x + 1.0), weights=half * w)

    def __len__(self):
        return self.nodes.size


def integrate_frequency(f, grid: FrequencyGrid):
    """Sum w_i * f(omega_i) for a callable or an array of node values."""
    vals = f(grid.nodes) if callable(f) else np.asarray(f)
    if vals.shape != grid.nodes.shape:
        raise ValueError(f"integrand has shape {vals.shape}, grid {grid.nodes.shape}")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        node = grid.nodes[np.argmax(bad)]
        raise QuadratureError(f"non-finite integrand value at omega = {node:.6g}")
    return np.sum(grid.weights * vals)


@dataclass
class FourierResult:
    """Value of a half-line Fourier integral plus convergence metadata."""

    value: complex
    tau_star: float
    decayed: bool
    message: str = ""

    def __complex__(self):
        return complex(self.value)


@dataclass
class _PanelSweep:
    """Shared composite Gauss-Legendre sweep over [0, tau_max].

    Panels of `panel_nodes` Gauss-Legendre points are laid out with average
    node spacing <= step, so oscillations at the requested frequencies stay
    resolved while the rule converges spectrally on smooth integrands.
    """

    step: float
    tau_max: float
    panel_nodes: int = _PANEL_NODES
    _x: np.ndarray = field(init=False)
    _w: np.ndarray = field(init=False)

    def __post_init__(self):
        self._x, self._w = np.polynomial.legendre.leggauss(self.panel_nodes)

    def panels(self, chunk=64):
        """Yield (tau, weights) arrays for consecutive chunks of panels."""
        width = self.panel_nodes * self.step
        edges = np.arange(0.0, self.tau_max + width, width)
        edges[-1] = min(edges[-1], self.tau_max)
        n_panels = edges.size - 1
        for start in range(0, n_panels, chunk):
            stop = min(start + chunk, n_panels)
            lo = edges[start:stop, None]
            hi = edges[start + 1 : stop + 1, None]
            tau = 0.5 * (hi - lo) * self._x + 0.5 * (hi + lo)
            wts = 0.5 * (hi - lo) * self._w
            yield tau.ravel(), wts.ravel()


def oscillation_step(w, beta=None, max_step=DEFAULT_MAX_STEP):
    """Step rule min(0.05/|w|, 0.02*beta, max_step) for the time rule."""
    step = max_step
    w = abs(w)
    if w > 0:
        step = min(step, 0.05 / w)
    if beta is not None:
        step = min(step, 0.02 * beta)
    return step


def half_line_fourier(g, w, tau_max=DEFAULT_TAU_MAX, tol=DEFAULT_DECAY_TOL,
                      max_step=DEFAULT_MAX_STEP, beta=None):
    """Integrate g(tau) * exp(i*w*tau) over [0, tau*].

    tau* is the end of the first quadrature panel on which |g| has dropped
    below tol (or tau_max, whichever comes first).  g must accept an ndarray
    of times.  If |g| has not decayed below tol by tau_max the result carries
    a convergence warning in its metadata.
    """
    sweep = _PanelSweep(step=oscillation_step(w, beta, max_step), tau_max=tau_max)
    total = 0.0 + 0.0j
    tau_star = 0.0
    decayed = False
    for tau, wts in sweep.panels(chunk=1):
        gv = np.asarray(g(tau), dtype=complex)
        if np.any(~np.isfinite(gv)):
            raise QuadratureError(f"non-finite correlation value near tau = {tau[0]:.4g}")
        total += np.sum(wts * gv * np.exp(1j * w * tau))
        tau_star = tau[-1]
        if np.max(np.abs(gv)) < tol:
            decayed = True
            break
    msg = "" if decayed else f"|g| not below {tol:g} at tau_max = {tau_max:g} ps"
    return FourierResult(value=complex(total), tau_star=float(tau_star),
                         decayed=decayed, message=msg)


def batched_half_line_fourier(funcs, ws, tau_max=DEFAULT_TAU_MAX,
                              tol=DEFAULT_DECAY_TOL, max_step=DEFAULT_MAX_STEP,
                              beta=None, scales=None, warn_label=""):
    """Half-line Fourier transforms of several correlations at several w.

    Evaluates every function on one shared panel sweep (step resolved for the
    fastest |w|) and accumulates all len(funcs) x len(ws) integrals in a
    single pass.  The sweep stops once every |funcs[k]| has dropped below
    tol * scales[k].  Returns (values, decayed, tau_star).
    """
    ws = np.asarray(ws, dtype=float)
    step = min(oscillation_step(w, beta, max_step) for w in ws)
    sweep = _PanelSweep(step=step, tau_max=tau_max)
    if scales is None:
        scales = np.ones(len(funcs))
    thresholds = tol * np.asarray(scales, dtype=float)
    out = np.zeros((len(funcs), ws.size), dtype=complex)
    decayed = np.zeros(len(funcs), dtype=bool)
    tau_star = 0.0
    per_panel = sweep.panel_nodes
    done = False
    for tau, wts in sweep.panels():
        values = np.empty((len(funcs), tau.size), dtype=complex)
        for k, g in enumerate(funcs):
            gv = np.asarray(g(tau), dtype=complex)
            if np.any(~np.isfinite(gv)):
                raise QuadratureError(
                    f"non-finite correlation value in {warn_label or 'transform'} "
                    f"near tau = {tau[0]:.4g}")
            values[k] = gv
        # tau* is the end of the first panel on which every correlation sits
        # below its tolerance; contributions past it are dropped
        n_panels = tau.size // per_panel
        panel_max = np.abs(values).reshape(len(funcs), n_panels, -1).max(axis=2)
        below = panel_max < thresholds[:, None]
        all_below = np.all(below, axis=0)
        if np.any(all_below):
            stop = int(np.argmax(all_below))
            keep = (stop + 1) * per_panel
            decayed[:] = below[:, stop]
            done = True
        else:
            stop = n_panels - 1
            keep = tau.size
            decayed[:] = below[:, stop]
        phases = wts[:keep, None] * np.exp(1j * np.outer(tau[:keep], ws))
        out += values[:, :keep] @ phases
        tau_star = tau[keep - 1]
        if done:
            break
    return out, decayed, tau_star
