import csv
import json

import numpy as np
import pytest
import yaml

from qdemission import ConfigError, parse_config, run_experiment
from qdemission.cli import main
from qdemission.config import config_from_mapping

MINIMAL = {
    "params": {"omega": 0.157, "alpha": 0.027, "omega_c": 2.2,
               "temperature": 4.0, "t1": 700.0},
    "mode": "g1",
}


def write_config(tmp_path, mapping, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(mapping))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# --- parsing ---------------------------------------------------------------------

def test_minimal_config_defaults(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL))
    assert cfg.mode == "g1"
    assert cfg.numerics.frequency_nodes == 400
    assert cfg.numerics.fixed_point_tol == 1e-10
    assert cfg.grids.tau_points == 2048
    assert cfg.threads == 1
    assert cfg.resonant  # nu defaults to the polaron-shift resonance
    assert cfg.params.gamma1 == pytest.approx(1.0 / 700.0)


def test_preset_fig1_expansion():
    cfg = config_from_mapping({"preset": "fig1",
                               "params": {"omega": 0.157}, "mode": "g1"})
    assert cfg.params.gamma1 == pytest.approx(1.0 / 700.0)
    assert cfg.params.alpha == 0.027
    assert cfg.params.omega_c == 2.2
    assert cfg.params.temperature == 4.0


def test_preset_fig2_expansion():
    cfg = config_from_mapping({"preset": "fig2",
                               "params": {"omega": 0.025}, "mode": "spectrum"})
    assert cfg.params.gamma1 == pytest.approx(1.0 / 400.0)
    assert cfg.params.temperature == 10.0


def test_resonant_nu_resolution():
    cfg = config_from_mapping({"preset": "fig1",
                               "params": {"omega": 0.1}, "mode": "g1"})
    # polaron shift alpha omega_c^3 sqrt(pi)/4
    assert cfg.params.nu == pytest.approx(
        0.027 * 2.2**3 * np.sqrt(np.pi) / 4.0, rel=1e-9)


@pytest.mark.parametrize("mapping,fragment", [
    ({**MINIMAL, "params": {**MINIMAL["params"], "temperature": -1}},
     "params.temperature"),
    ({**MINIMAL, "bogus": 1}, "bogus"),
    ({**MINIMAL, "params": {**MINIMAL["params"], "tt1": 1.0}}, "params.tt1"),
    ({**MINIMAL, "mode": "wiggle"}, "mode"),
    ({**MINIMAL, "mode": "coherent_sweep"}, "sweep"),
    ({**MINIMAL, "mode": "coherent_sweep", "sweep": {"values": []}}, "empty"),
    ({**MINIMAL, "numerics": {"frequency_nodes": "many"}},
     "numerics.frequency_nodes"),
    ({**MINIMAL, "params": {**MINIMAL["params"], "nu": "sideways"}},
     "params.nu"),
    ({**MINIMAL, "sweep": {"values": [1.0]}}, "does not take"),
])
def test_invalid_configs_rejected(mapping, fragment):
    with pytest.raises(ConfigError, match=fragment):
        config_from_mapping(mapping)


def test_sweep_specifications():
    base = {**MINIMAL, "mode": "coherent_sweep"}
    cfg = config_from_mapping({**base, "sweep": {"values": [0.3, 0.1, 0.2]}})
    assert cfg.sweep_values == (0.1, 0.2, 0.3)  # sorted
    cfg = config_from_mapping(
        {**base, "sweep": {"start": 0.01, "stop": 1.0, "num": 5,
                           "spacing": "log"}})
    assert len(cfg.sweep_values) == 5
    assert cfg.sweep_values[0] == pytest.approx(0.01)
    assert cfg.sweep_values[-1] == pytest.approx(1.0)


def test_gamma1_and_t1_are_exclusive():
    bad = {**MINIMAL, "params": {**MINIMAL["params"], "gamma1": 0.002}}
    with pytest.raises(ConfigError, match="not both"):
        config_from_mapping(bad)


# --- running ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def sweep_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    cfg = config_from_mapping({
        "preset": "fig1",
        "params": {"omega": 0.1},
        "mode": "coherent_sweep",
        "sweep": {"values": [0.3, 1.0]},
        "output": str(out),
    })
    result = run_experiment(cfg)
    return cfg, result


def test_coherent_sweep_columns(sweep_outputs):
    _, result = sweep_outputs
    header, rows = read_csv(result["csv"])
    assert header == ["omega", "omega_r", "epsilon", "g1_coh_full",
                      "g1_inc0_full", "g1_total0", "g1_coh_pd", "G1_coh_eq4",
                      "status"]
    assert len(rows) == 2
    for row in rows:
        assert row[-1] in ("ok", "warned")
        omega, omega_r = float(row[0]), float(row[1])
        assert 0.0 < omega_r <= omega
        total = float(row[5])
        assert float(row[3]) + float(row[4]) == pytest.approx(total, rel=1e-12)


def test_meta_sidecar(sweep_outputs):
    cfg, result = sweep_outputs
    with open(result["meta"]) as fh:
        meta = json.load(fh)
    assert meta["library"] == "qdemission"
    assert meta["config"]["mode"] == "coherent_sweep"
    assert len(meta["rows"]) == 2
    assert all(r["status"] in ("ok", "warned") for r in meta["rows"])


def test_deterministic_reruns(tmp_path):
    bodies = []
    for name in ("a", "b"):
        out = tmp_path / name
        cfg = config_from_mapping({
            "preset": "fig2",
            "params": {"omega": 0.05},
            "mode": "coherent_sweep",
            "sweep": {"values": [0.05, 0.08]},
            "output": str(out),
        })
        result = run_experiment(cfg)
        bodies.append(open(result["csv"], "rb").read())
    assert bodies[0] == bodies[1]


def test_failed_rows_keep_sweep_alive(tmp_path):
    # an unresolvable triplet at very weak driving fails its row; the other
    # row still completes
    cfg = config_from_mapping({
        "preset": "fig2",
        "params": {"omega": 0.025},
        "mode": "resonant_sweep",
        "sweep": {"values": [0.0005, 0.05]},
        "output": str(tmp_path / "rs"),
    })
    result = run_experiment(cfg)
    header, rows = read_csv(result["csv"])
    assert result["n_failed"] == 1
    status = {float(r[0]): r[-1] for r in rows}
    assert status[0.0005] == "failed"
    assert status[0.05] in ("ok", "warned")
    failed_row = [r for r in rows if r[-1] == "failed"][0]
    assert float(failed_row[0]) == 0.0005  # sweep value kept for bookkeeping
    assert all(cell == "" for cell in failed_row[1:-1])


def test_spectrum_mode_outputs(tmp_path):
    cfg = config_from_mapping({
        "preset": "fig2",
        "params": {"omega": 0.05},
        "mode": "spectrum",
        "output": str(tmp_path / "spec"),
    })
    result = run_experiment(cfg)
    header, rows = read_csv(result["csv"])
    assert header == ["omega", "s_inc", "status"]
    assert len(rows) == 4001
    with open(result["meta"]) as fh:
        meta = json.load(fh)
    fit = meta["summary"]["fit"]
    assert fit is not None
    assert fit["splitting"] > 0
    assert len(fit["peaks"]) == 3


def test_g1_mode_outputs(tmp_path):
    cfg = config_from_mapping({
        "preset": "fig1",
        "params": {"omega": 0.3},
        "mode": "g1",
        "grids": {"tau_points": 256},
        "output": str(tmp_path / "g1"),
    })
    result = run_experiment(cfg)
    header, rows = read_csv(result["csv"])
    assert header[:5] == ["tau", "g1_re", "g1_im", "g1_abs", "g1_arg"]
    assert len(rows) == 256
    # pure-dephasing comparison columns are populated on resonance
    assert rows[0][8] != ""
    g1_0 = float(rows[0][1])
    with open(result["meta"]) as fh:
        meta = json.load(fh)
    assert meta["summary"]["g1_total0"] == pytest.approx(g1_0, rel=1e-10)


def test_oracle_compare_mode(tmp_path):
    cfg = config_from_mapping({
        "preset": "fig1",
        "params": {"omega": 0.05},
        "mode": "oracle_compare",
        "grids": {"tau_points": 128},
        "output": str(tmp_path / "oc"),
    })
    result = run_experiment(cfg)
    summary = result["summary"]
    # weak resonant driving: pure dephasing is a good approximation
    assert summary["max_rel_to_g1_0"] < 0.02


def test_threads_give_identical_output(tmp_path):
    bodies = []
    for threads, name in ((1, "t1"), (3, "t3")):
        cfg = config_from_mapping({
            "preset": "fig1",
            "params": {"omega": 0.15},
            "mode": "coherent_sweep",
            "sweep": {"values": [0.1, 0.2, 0.3]},
            "threads": threads,
            "output": str(tmp_path / name),
        })
        result = run_experiment(cfg)
        bodies.append(open(result["csv"], "rb").read())
    assert bodies[0] == bodies[1]


# --- command line -----------------------------------------------------------------

def test_cli_simulate(tmp_path, capsys):
    path = write_config(tmp_path, {
        "preset": "fig1",
        "params": {"omega": 0.3},
        "mode": "coherent_sweep",
        "sweep": {"values": [0.3]},
        "output": str(tmp_path / "unused"),
    })
    code = main(["simulate", "--config", path, "--out", str(tmp_path / "cli")])
    assert code == 0
    out = capsys.readouterr().out
    assert "coherent_sweep.csv" in out
    assert (tmp_path / "cli" / "coherent_sweep.csv").exists()
    assert (tmp_path / "cli" / "coherent_sweep.meta.json").exists()


def test_cli_mode_override(tmp_path):
    path = write_config(tmp_path, {
        "preset": "fig2",
        "params": {"omega": 0.05},
        "mode": "spectrum",
        "output": str(tmp_path / "o1"),
    })
    code = main(["simulate", "--config", path, "--mode", "g1",
                 "--out", str(tmp_path / "o2")])
    assert code == 0
    assert (tmp_path / "o2" / "g1.csv").exists()


def test_cli_check(tmp_path, capsys):
    path = write_config(tmp_path, {
        "preset": "fig1",
        "params": {"omega": 0.5},
        "mode": "g1",
    })
    code = main(["simulate", "--config", path, "--check"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out and "FAIL" not in out
