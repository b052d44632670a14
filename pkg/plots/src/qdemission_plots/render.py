"""Batch figure renderer.

Renders the two multi-panel layouts from sweep CSVs and writes vector (PDF)
plus raster (PNG) files.  Strictly read-only over its inputs: every number
plotted comes from the CSV/JSON files.
"""

from __future__ import annotations

import os
import warnings

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe
from .schema import Table, load_table

FULL_STYLE = dict(color="tab:blue", lw=1.4)
PD_STYLE = dict(color="black", lw=1.2, ls="--")
EQ4_STYLE = dict(color="tab:orange", lw=1.2, ls=":")


def _apply_range(ax, recipe, panel):
    lo_hi = recipe.axis_ranges.get(panel)
    if lo_hi:
        ax.set_xlim(lo_hi[0], lo_hi[1])


def _panel_label(table: Table):
    meta = table.meta or {}
    omega = (meta.get("config", {}) or {}).get("params", {}).get("omega")
    if omega is not None:
        return rf"$\Omega = {omega:g}\ \mathrm{{ps^{{-1}}}}$"
    return os.path.basename(table.path)


def _render_fig1(recipe: FigureRecipe):
    corr = [load_table(p, "g1") for p in recipe.correlation_csvs]
    corr = [t for t in corr if len(t)]
    sweep = load_table(recipe.sweep_csv, "coherent_sweep") \
        if recipe.sweep_csv and os.path.exists(recipe.sweep_csv) else None
    if sweep is not None and not len(sweep):
        sweep = None
    if not corr and sweep is None:
        warnings.warn("fig1 recipe has no plottable input; nothing rendered",
                      RuntimeWarning, stacklevel=2)
        return None

    n_top = max(len(corr), 1)
    fig, axes = plt.subplots(2, max(n_top, 2),
                             figsize=(3.2 * max(n_top, 2), 5.4))

    for k in range(max(n_top, 2)):
        ax = axes[0, k]
        if k >= len(corr):
            ax.set_axis_off()
            continue
        t = corr[k]
        ax.plot(t["tau"], t["g1_re"], label="full", **FULL_STYLE)
        if np.any(np.isfinite(t["g1_pd_total"])):
            ax.plot(t["tau"], t["g1_pd_total"], label="pure dephasing",
                    **PD_STYLE)
        ax.axhline(t["g1_coh"][0], color="0.6", lw=0.7)
        ax.set_xlabel(r"$\tau$ (ps)")
        ax.set_ylabel(r"$g^{(1)}(\tau)$")
        ax.set_title(_panel_label(t), fontsize=9)
        if k == 0:
            ax.legend(fontsize=7, frameon=False)
        _apply_range(ax, recipe, f"g1_{k}")

    for ax in axes[1]:
        ax.set_axis_off()
    if sweep is not None:
        ax_lo = fig.add_subplot(2, 2, 3)
        ax_hi = fig.add_subplot(2, 2, 4)
        omega = sweep["omega"]
        for ax in (ax_lo, ax_hi):
            ax.plot(omega, sweep["g1_coh_full"], label=r"$g^{(1)}_{\rm coh}$",
                    **FULL_STYLE)
            ax.plot(omega, sweep["g1_inc0_full"], color="tab:blue", lw=1.4,
                    ls="-.", label=r"$g^{(1)}_{\rm inc}$")
            ax.plot(omega, sweep["g1_total0"], color="tab:blue", lw=0.9,
                    label="total")
            ax.plot(omega, sweep["g1_coh_pd"], **PD_STYLE)
            ax.plot(omega, sweep["G1_coh_eq4"], **EQ4_STYLE)
            ax.set_xlabel(r"$\Omega$ (ps$^{-1}$)")
        # left panel: the region near the origin where the pure-dephasing
        # coherent fraction is visible at all
        ax_lo.set_xlim(0.0, min(0.2, omega.max()))
        ax_lo.set_ylim(0.0, 1.05 * sweep["g1_total0"].max())
        ax_lo.set_ylabel("scattering")
        ax_hi.legend(fontsize=7, frameon=False)
        _apply_range(ax_lo, recipe, "sweep_lo")
        _apply_range(ax_hi, recipe, "sweep_hi")

    fig.tight_layout()
    return fig


def _sideband_inset(ax, tables, enhance_last):
    """Red sidebands shifted onto their maxima and rescaled to unit height."""
    inset = ax.inset_axes([0.06, 0.55, 0.36, 0.4])
    for k, t in enumerate(tables):
        om, s = t["omega"], t["s_inc"]
        red = om < -1e-12
        if not np.any(red):
            continue
        om_r, s_r = om[red], s[red]
        peak = np.argmax(s_r)
        inset.plot(om_r - om_r[peak], s_r / s_r[peak],
                   lw=0.9, color=f"C{k}")
    inset.set_xticks([])
    inset.set_yticks([])
    width = max(np.ptp(t["omega"]) for t in tables) / 12.0
    inset.set_xlim(-width, width)


def _render_fig2(recipe: FigureRecipe):
    spectra = [load_table(p, "spectrum") for p in recipe.spectrum_csvs]
    spectra = [t for t in spectra if len(t)]
    resonant = load_table(recipe.resonant_csv, "resonant_sweep") \
        if recipe.resonant_csv and os.path.exists(recipe.resonant_csv) else None
    detuning = load_table(recipe.detuning_csv, "detuning_sweep") \
        if recipe.detuning_csv and os.path.exists(recipe.detuning_csv) else None
    if resonant is not None and not len(resonant):
        resonant = None
    if detuning is not None and not len(detuning):
        detuning = None
    if not spectra and resonant is None and detuning is None:
        warnings.warn("fig2 recipe has no plottable input; nothing rendered",
                      RuntimeWarning, stacklevel=2)
        return None

    fig, axes = plt.subplots(3, 2, figsize=(7.2, 8.0))

    # top row: spectra (left: resonant pair, right: detuned, display-scaled)
    for col, ax in enumerate(axes[0]):
        take = spectra[:2] if col == 0 else spectra[2:4]
        for k, t in enumerate(take):
            scale = recipe.enhance if (col == 1 and k == len(take) - 1
                                       and recipe.enhance != 1.0) else 1.0
            label = _spectrum_label(t, scale)
            style = dict(color="black", lw=1.1) if k == 0 else \
                dict(color="tab:red", lw=1.1, ls="--")
            ax.plot(t["omega"], scale * t["s_inc"], label=label, **style)
        if take:
            if recipe.insets:
                _sideband_inset(ax, take, recipe.enhance)
            ax.legend(fontsize=7, frameon=False)
        else:
            ax.set_axis_off()
        ax.set_xlabel(r"$\omega - \omega_l$ (ps$^{-1}$)")
        ax.set_ylabel(r"$S_{\rm inc}$ (arb.)")
        _apply_range(ax, recipe, f"spectrum_{col}")

    # middle row: extracted splitting vs driving / detuning
    if resonant is not None:
        ax = axes[1, 0]
        ax.plot(resonant["omega"], resonant["splitting"], "x",
                color="tab:red", label="extracted")
        ax.plot(resonant["omega"], 2.0 * resonant["omega_r"], "-",
                color="tab:blue", lw=1.1, label=r"$2\Omega_r$")
        ax.set_xlabel(r"$\Omega$ (ps$^{-1}$)")
        ax.set_ylabel("splitting (ps$^{-1}$)")
        ax.legend(fontsize=7, frameon=False)
    else:
        axes[1, 0].set_axis_off()
    if detuning is not None:
        ax = axes[1, 1]
        eps = detuning["epsilon"]
        ax.plot(eps, detuning["splitting"], "x", color="tab:red",
                label="extracted")
        # the generalized splitting uses the resonant point's Omega_r from
        # the same CSV family when available
        if resonant is not None and len(resonant):
            omega_r0 = resonant["omega_r"][0]
            ax.plot(eps, 2.0 * np.hypot(omega_r0, eps), "-",
                    color="tab:blue", lw=1.1,
                    label=r"$2\sqrt{\Omega_r^2+\epsilon^2}$")
        ax.set_xlabel(r"$\epsilon$ (ps$^{-1}$)")
        ax.set_ylabel("splitting (ps$^{-1}$)")
        ax.legend(fontsize=7, frameon=False)
    else:
        axes[1, 1].set_axis_off()

    # bottom row: sideband widths
    for col, table, xname, xlabel in ((0, resonant, "omega", r"$\Omega$ (ps$^{-1}$)"),
                                      (1, detuning, "epsilon", r"$\epsilon$ (ps$^{-1}$)")):
        ax = axes[2, col]
        if table is None:
            ax.set_axis_off()
            continue
        ax.plot(table[xname], table["red_fwhm"], "x", color="tab:red",
                label="red sideband")
        ax.plot(table[xname], table["blue_fwhm"], "+", color="tab:blue",
                label="blue sideband")
        ax.plot(table[xname], table["width_prediction"], "-", color="0.4",
                lw=1.0, label="width formula")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("sideband FWHM (ps$^{-1}$)")
        ax.legend(fontsize=7, frameon=False)
        _apply_range(ax, recipe, f"widths_{col}")

    fig.tight_layout()
    return fig


def _spectrum_label(table: Table, scale):
    meta = table.meta or {}
    summary = meta.get("summary", {}) or {}
    eps = summary.get("epsilon")
    omega = (meta.get("config", {}) or {}).get("params", {}).get("omega")
    bits = []
    if omega is not None:
        bits.append(rf"$\Omega={omega:g}$")
    if eps is not None:
        bits.append(rf"$\epsilon={eps:.3g}$")
    if scale != 1.0:
        bits.append(rf"$\times {scale:g}$")
    return ", ".join(bits) if bits else os.path.basename(table.path)


def render(recipe: FigureRecipe, out_dir):
    """Render the recipe; write <layout>.pdf and <layout>.png under out_dir.

    Returns the list of written paths (empty when every input was empty).
    """
    fig = _render_fig1(recipe) if recipe.layout == "fig1" else \
        _render_fig2(recipe)
    if fig is None:
        return []
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for ext in ("pdf", "png"):
        path = os.path.join(out_dir, f"{recipe.layout}.{ext}")
        fig.savefig(path, dpi=200)
        written.append(path)
    plt.close(fig)
    return written
