"""Experiment configuration: YAML schema, validation, presets.

The config file is a structured key-value (YAML) document; every key is
validated and unknown keys are rejected with their path.  Units follow the
package convention (ps^-1 angular frequencies, ps times, K temperatures);
`nu: resonant` resolves to the polaron-shift detuning so the converged
polaron-limit epsilon vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

from .params import PhysicalParams
from .quadrature import FrequencyGrid
from .variational import resonant_nu

MODES = ("g1", "coherent_sweep", "spectrum", "detuning_sweep",
         "resonant_sweep", "oracle_compare")
SWEEP_MODES = ("coherent_sweep", "detuning_sweep", "resonant_sweep")

# Figure presets: (T1 ps, alpha ps^2, omega_c ps^-1, T K)
PRESETS = {
    "fig1": {"t1": 700.0, "alpha": 0.027, "omega_c": 2.2, "temperature": 4.0},
    "fig2": {"t1": 400.0, "alpha": 0.027, "omega_c": 2.2, "temperature": 10.0},
}


class ConfigError(ValueError):
    """Invalid configuration; message carries the key path."""


@dataclass(frozen=True)
class Numerics:
    frequency_nodes: int = 400
    time_max: float = 50.0          # ps, upper limit of time integrals
    decay_tol: float = 1e-12
    fixed_point_tol: float = 1e-10
    max_iterations: int = 500


@dataclass(frozen=True)
class GridOptions:
    tau_max: float | None = None    # ps, default 20/gamma1 (auto-extended)
    tau_points: int = 2048
    omega_points: int = 4001
    omega_span: float = 3.0         # in units of the dressed splitting


@dataclass(frozen=True)
class ExperimentConfig:
    params: PhysicalParams
    mode: str
    sweep_values: tuple = ()
    grids: GridOptions = field(default_factory=GridOptions)
    numerics: Numerics = field(default_factory=Numerics)
    output: str = "out"
    threads: int = 1
    resonant: bool = False          # whether nu was given as "resonant"

    def describe(self):
        d = {
            "params": asdict(self.params),
            "mode": self.mode,
            "sweep_values": list(self.sweep_values),
            "grids": asdict(self.grids),
            "numerics": asdict(self.numerics),
            "output": self.output,
            "threads": self.threads,
            "resonant": self.resonant,
        }
        return d


def _reject_unknown(mapping, allowed, path):
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}{key}' "
                              f"(allowed: {', '.join(sorted(allowed))})")


def _number(value, path, positive=False, nonnegative=False):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{path}' must be a number, got {value!r}") from None
    if not np.isfinite(out):
        raise ConfigError(f"'{path}' must be finite, got {value!r}")
    if positive and out <= 0:
        raise ConfigError(f"'{path}' must be > 0, got {out}")
    if nonnegative and out < 0:
        raise ConfigError(f"'{path}' must be >= 0, got {out}")
    return out


def _integer(value, path, minimum=1):
    out = int(_number(value, path))
    if out < minimum:
        raise ConfigError(f"'{path}' must be >= {minimum}, got {out}")
    return out


def _sweep_values(raw):
    _reject_unknown(raw, {"values", "start", "stop", "num", "spacing"}, "sweep.")
    if "values" in raw:
        values = [_number(v, "sweep.values[]") for v in raw["values"]]
    else:
        for key in ("start", "stop", "num"):
            if key not in raw:
                raise ConfigError(f"sweep needs 'values' or 'start/stop/num' "
                                  f"(missing '{key}')")
        start = _number(raw["start"], "sweep.start")
        stop = _number(raw["stop"], "sweep.stop")
        num = _integer(raw["num"], "sweep.num", minimum=2)
        spacing = raw.get("spacing", "linear")
        if spacing == "linear":
            values = np.linspace(start, stop, num).tolist()
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log spacing needs positive sweep bounds")
            values = np.geomspace(start, stop, num).tolist()
        else:
            raise ConfigError(f"'sweep.spacing' must be linear or log, got {spacing!r}")
    if not values:
        raise ConfigError("sweep value list is empty")
    return tuple(sorted(values))


def config_from_mapping(raw) -> ExperimentConfig:
    """Validate and resolve a raw mapping into an ExperimentConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _reject_unknown(raw, {"preset", "params", "mode", "sweep", "grids",
                          "numerics", "output", "threads"}, "")

    param_raw = dict(PRESETS.get(raw.get("preset", ""), {}))
    if "preset" in raw and raw["preset"] not in PRESETS:
        raise ConfigError(f"unknown preset {raw['preset']!r} "
                          f"(known: {', '.join(sorted(PRESETS))})")
    user_params = raw.get("params", {}) or {}
    _reject_unknown(user_params, {"nu", "omega", "alpha", "omega_c",
                                  "temperature", "gamma1", "t1"}, "params.")
    param_raw.update(user_params)

    for key in ("omega", "alpha", "omega_c", "temperature"):
        if key not in param_raw:
            raise ConfigError(f"missing required key 'params.{key}'")
    if "gamma1" in param_raw and "t1" in param_raw and "t1" in user_params \
            and "gamma1" in user_params:
        raise ConfigError("give either 'params.gamma1' or 'params.t1', not both")
    if "gamma1" in user_params:
        gamma1 = _number(param_raw["gamma1"], "params.gamma1", positive=True)
    elif "t1" in param_raw:
        gamma1 = 1.0 / _number(param_raw["t1"], "params.t1", positive=True)
    elif "gamma1" in param_raw:
        gamma1 = _number(param_raw["gamma1"], "params.gamma1", positive=True)
    else:
        raise ConfigError("missing required key 'params.gamma1' (or 'params.t1')")

    numerics_raw = raw.get("numerics", {}) or {}
    _reject_unknown(numerics_raw, {"frequency_nodes", "time_max", "decay_tol",
                                   "fixed_point_tol", "max_iterations"}, "numerics.")
    numerics = Numerics(
        frequency_nodes=_integer(numerics_raw.get("frequency_nodes", 400),
                                 "numerics.frequency_nodes", minimum=8),
        time_max=_number(numerics_raw.get("time_max", 50.0),
                         "numerics.time_max", positive=True),
        decay_tol=_number(numerics_raw.get("decay_tol", 1e-12),
                          "numerics.decay_tol", positive=True),
        fixed_point_tol=_number(numerics_raw.get("fixed_point_tol", 1e-10),
                                "numerics.fixed_point_tol", positive=True),
        max_iterations=_integer(numerics_raw.get("max_iterations", 500),
                                "numerics.max_iterations"),
    )

    alpha = _number(param_raw["alpha"], "params.alpha", nonnegative=True)
    omega_c = _number(param_raw["omega_c"], "params.omega_c", positive=True)
    temperature = _number(param_raw["temperature"], "params.temperature",
                          positive=True)
    omega = _number(param_raw["omega"], "params.omega", nonnegative=True)

    nu_raw = param_raw.get("nu", "resonant")
    resonant = isinstance(nu_raw, str)
    if resonant:
        if nu_raw != "resonant":
            raise ConfigError(f"'params.nu' must be a number or 'resonant', "
                              f"got {nu_raw!r}")
        probe = PhysicalParams(nu=0.0, omega=omega, alpha=alpha, omega_c=omega_c,
                               temperature=temperature, gamma1=gamma1)
        grid = FrequencyGrid.for_cutoff(omega_c, n=numerics.frequency_nodes)
        nu = resonant_nu(probe, grid)
    else:
        nu = _number(nu_raw, "params.nu")

    try:
        params = PhysicalParams(nu=nu, omega=omega, alpha=alpha, omega_c=omega_c,
                                temperature=temperature, gamma1=gamma1)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigError(f"'mode' must be one of {', '.join(MODES)}, got {mode!r}")

    sweep_values = ()
    if mode in SWEEP_MODES:
        if "sweep" not in raw or raw["sweep"] is None:
            raise ConfigError(f"mode '{mode}' requires a 'sweep' section")
        sweep_values = _sweep_values(raw["sweep"])
        if mode in ("coherent_sweep", "resonant_sweep") and \
                any(v < 0 for v in sweep_values):
            raise ConfigError("driving-strength sweep values must be >= 0")
    elif "sweep" in raw and raw["sweep"]:
        raise ConfigError(f"mode '{mode}' does not take a 'sweep' section")

    grids_raw = raw.get("grids", {}) or {}
    _reject_unknown(grids_raw, {"tau_max", "tau_points", "omega_points",
                                "omega_span"}, "grids.")
    grids = GridOptions(
        tau_max=None if grids_raw.get("tau_max") is None
        else _number(grids_raw["tau_max"], "grids.tau_max", positive=True),
        tau_points=_integer(grids_raw.get("tau_points", 2048),
                            "grids.tau_points", minimum=16),
        omega_points=_integer(grids_raw.get("omega_points", 4001),
                              "grids.omega_points", minimum=101),
        omega_span=_number(grids_raw.get("omega_span", 3.0),
                           "grids.omega_span", positive=True),
    )

    output = raw.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigError("'output' must be a non-empty path string")
    threads = _integer(raw.get("threads", 1), "threads")

    return ExperimentConfig(params=params, mode=mode, sweep_values=sweep_values,
                            grids=grids, numerics=numerics, output=output,
                            threads=threads, resonant=resonant)


def parse_config(path, overrides=None) -> ExperimentConfig:
    """Load a YAML config file; overrides (flat dict) replace top-level keys."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(raw)
