"""Figure recipes: which CSVs feed which panel layout.

A recipe is either one of the built-in presets ("fig1", "fig2") with
conventional filenames resolved against the input directory, or a YAML file
with the same fields spelled out.
"""

from __future__ import annotations

import glob
import os
from dataclasses import dataclass, field

import yaml

LAYOUTS = ("fig1", "fig2")


class RecipeError(ValueError):
    pass


@dataclass
class FigureRecipe:
    """Inputs and toggles for one multi-panel figure.

    layout            "fig1" (g1 panels + scattering fractions vs driving)
                      or "fig2" (spectra + splitting + widths vs driving
                      and detuning)
    correlation_csvs  g1-mode CSVs, one upper panel each (fig1)
    sweep_csv         coherent_sweep CSV (fig1)
    spectrum_csvs     spectrum-mode CSVs for the top row (fig2)
    resonant_csv      resonant_sweep CSV (fig2 left column)
    detuning_csv      detuning_sweep CSV (fig2 right column)
    enhance           display scaling applied to the off-resonant spectrum
    insets            overlay the red sidebands shifted and rescaled to
                      unit height (fig2 top row)
    axis_ranges       optional {panel: [lo, hi]} x-range overrides
    """

    layout: str
    correlation_csvs: tuple = ()
    sweep_csv: str | None = None
    spectrum_csvs: tuple = ()
    resonant_csv: str | None = None
    detuning_csv: str | None = None
    enhance: float = 5.0
    insets: bool = True
    axis_ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise RecipeError(f"unknown layout {self.layout!r} "
                              f"(known: {', '.join(LAYOUTS)})")

    def inputs(self):
        paths = list(self.correlation_csvs) + list(self.spectrum_csvs)
        paths += [p for p in (self.sweep_csv, self.resonant_csv,
                              self.detuning_csv) if p]
        return paths


def preset_recipe(name, in_dir) -> FigureRecipe:
    """Built-in recipes with conventional filenames under in_dir."""
    if name == "fig1":
        return FigureRecipe(
            layout="fig1",
            correlation_csvs=tuple(sorted(
                glob.glob(os.path.join(in_dir, "g1*.csv")))),
            sweep_csv=os.path.join(in_dir, "coherent_sweep.csv"),
        )
    if name == "fig2":
        return FigureRecipe(
            layout="fig2",
            spectrum_csvs=tuple(sorted(
                glob.glob(os.path.join(in_dir, "spectrum*.csv")))),
            resonant_csv=os.path.join(in_dir, "resonant_sweep.csv"),
            detuning_csv=os.path.join(in_dir, "detuning_sweep.csv"),
        )
    raise RecipeError(f"unknown preset {name!r} (known: fig1, fig2)")


def load_recipe(source, in_dir) -> FigureRecipe:
    """Resolve a preset name or a YAML recipe file."""
    if source in LAYOUTS:
        return preset_recipe(source, in_dir)
    if not os.path.exists(source):
        raise RecipeError(f"recipe {source!r} is neither a preset nor a file")
    with open(source, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict) or "layout" not in raw:
        raise RecipeError(f"{source}: recipe must be a mapping with a 'layout'")
    allowed = {"layout", "correlation_csvs", "sweep_csv", "spectrum_csvs",
               "resonant_csv", "detuning_csv", "enhance", "insets",
               "axis_ranges"}
    unknown = set(raw) - allowed
    if unknown:
        raise RecipeError(f"{source}: unknown recipe keys {sorted(unknown)}")

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(in_dir, p)

    return FigureRecipe(
        layout=raw["layout"],
        correlation_csvs=tuple(resolve(p)
                               for p in raw.get("correlation_csvs", [])),
        sweep_csv=resolve(raw["sweep_csv"]) if raw.get("sweep_csv") else None,
        spectrum_csvs=tuple(resolve(p) for p in raw.get("spectrum_csvs", [])),
        resonant_csv=resolve(raw["resonant_csv"])
        if raw.get("resonant_csv") else None,
        detuning_csv=resolve(raw["detuning_csv"])
        if raw.get("detuning_csv") else None,
        enhance=float(raw.get("enhance", 5.0)),
        insets=bool(raw.get("insets", True)),
        axis_ranges=raw.get("axis_ranges", {}) or {},
    )
