import math

import numpy as np
import pytest

import hsto

CONFIG = """
[grid]
N1 = 8
N2 = 8
Nz = 4

[noise]
kind = "linear_multiplicative"
amplitude = 0.2

[run]
seed = 11
dt = 0.05
steps = 10
mode = "both"
"""


def test_run_shapes_and_determinism():
    a = hsto.run(CONFIG)
    b = hsto.run(CONFIG)
    assert a["steps_taken"] == 10
    assert not a["blowup"]
    assert a["state"]["T"].shape == (4, 8, 8)
    rec = a["records"]
    assert rec["t"][0] == 0.0
    assert math.isclose(rec["t"][-1], 0.5)
    assert np.all(np.isfinite(rec["split_gap"]))
    for key in rec:
        np.testing.assert_array_equal(rec[key], b["records"][key])
    assert a["max_barotropic_divergence"] < 1e-8


def test_config_errors_carry_kind():
    with pytest.raises(hsto.HstoError) as info:
        hsto.run(CONFIG.replace("dt = 0.05", "dt = -1.0"))
    assert info.value.kind == "invalid-value"
    with pytest.raises(hsto.HstoError) as info:
        hsto.run(CONFIG + "\nbogus = 1\n")
    assert info.value.kind == "unknown-key"


def test_echo_round_trip():
    text = hsto.echo_config(CONFIG)
    assert hsto.echo_config(text) == text


def test_gronwall_and_verify():
    g = hsto.gronwall_suite(50, 3)
    assert g["conclusion_ok"] == g["hypothesis_ok"] == 50
    rows = hsto.verify(8, 1, 5)
    assert {r["check"] for r in rows} >= {"self_adjoint_A", "coriolis_neutral"}
    assert all(r["pass"] for r in rows if r["check"] in ("self_adjoint_A", "coriolis_neutral"))


def test_cli_snapshot(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(CONFIG.replace("mode = \"both\"", "mode = \"direct\"") + "\n[output]\nsnapshot_every = 5\n")
    code, _, err = hsto.cli(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 0, err
    snap = hsto.read_snapshot(str(tmp_path / "out" / "snapshots" / "step_000010.bin"))
    assert snap["u"].shape == (4, 8, 8)
    assert math.isclose(snap["time"], 0.5)
    code, _, err = hsto.cli(["ensemble", "--config", str(cfg), "--out", str(tmp_path / "e"), "--runs", "0"])
    assert code == 1 and err.startswith("error:")
