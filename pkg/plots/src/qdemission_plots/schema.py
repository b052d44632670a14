"""CSV loading and schema validation for the simulation outputs.

This package reads only the delimited files (and their JSON sidecars)
written by the simulation CLI; no physics is computed here.  Rows whose
status column says "failed" are dropped before plotting.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = {
    "coherent_sweep": ["omega", "omega_r", "epsilon", "g1_coh_full",
                       "g1_inc0_full", "g1_total0", "g1_coh_pd",
                       "G1_coh_eq4", "status"],
    "detuning_sweep": ["epsilon", "splitting", "red_fwhm", "blue_fwhm",
                       "central_fwhm", "width_prediction", "status"],
    "resonant_sweep": ["omega", "omega_r", "splitting", "red_fwhm",
                       "blue_fwhm", "central_fwhm", "width_prediction",
                       "status"],
    "spectrum": ["omega", "s_inc", "status"],
    "g1": ["tau", "g1_re", "g1_im", "g1_abs", "g1_arg", "g1_inc_re",
           "g1_inc_im", "g1_coh", "g1_pd_inc", "g1_pd_total", "status"],
}


class SchemaError(ValueError):
    """CSV header does not match the expected column set."""


@dataclass
class Table:
    """Loaded CSV: column-name -> float array, failed rows removed."""

    kind: str
    path: str
    columns: dict
    n_failed: int
    meta: dict | None = None

    def __getitem__(self, name):
        return self.columns[name]

    def __len__(self):
        return 0 if not self.columns else len(next(iter(self.columns.values())))


def check_schema(header, kind, path):
    expected = COLUMNS[kind]
    if list(header) != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        raise SchemaError(
            f"{path}: header does not match the '{kind}' schema; "
            f"missing columns {missing or 'none'}, "
            f"unexpected columns {extra or 'none'}")


def load_table(path, kind) -> Table:
    """Read a CSV of the given kind; empty files load as zero-row tables."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file has no header row") from None
        check_schema(header, kind, path)
        rows = [r for r in reader if r]

    kept = [r for r in rows if r[-1] != "failed"]
    n_failed = len(rows) - len(kept)
    value_names = COLUMNS[kind][:-1]
    columns = {}
    for j, name in enumerate(value_names):
        columns[name] = np.array(
            [float(r[j]) if r[j] != "" else np.nan for r in kept])
    if not kept:
        warnings.warn(f"{path}: no plottable rows", RuntimeWarning,
                      stacklevel=2)

    meta = None
    meta_path = path.parent / (path.stem + ".meta.json")
    if meta_path.exists():
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    return Table(kind=kind, path=str(path), columns=columns,
                 n_failed=n_failed, meta=meta)
