"""End-to-end CLI behaviour: exit codes, overrides, output files."""

import json
from pathlib import Path

import numpy as np
import pytest

from netgreeks.cli import main
from netgreeks.network import FirmNetwork, save_network

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_symmetric_grid_success(tmp_path, capsys):
    cfg = _write(tmp_path, "grid.json", {
        "kind": "symmetric-grid", "a0": [0.5, 1.0], "w_s": 0.2, "w_d": 0.4,
        "sigma": 0.4,
    })
    out = tmp_path / "grid.csv"
    assert main(["symmetric-grid", "--config", cfg, "--out", str(out)]) == 0
    assert f"wrote {out}" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 3


def test_missing_out_is_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, "grid.json", {
        "kind": "symmetric-grid", "a0": 1.0, "w_s": 0.0, "w_d": 0.0,
        "sigma": 0.4,
    })
    assert main(["symmetric-grid", "--config", cfg]) == 2
    assert "no output path" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["price", "--config", str(tmp_path / "nope.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["price", "--config", str(bad)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_kind_mismatch(tmp_path, capsys):
    cfg = _write(tmp_path, "grid.json", {
        "kind": "symmetric-grid", "a0": 1.0, "w_s": 0.0, "w_d": 0.0,
        "sigma": 0.4,
    })
    assert main(["two-firm", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 2


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", "--config",
                 str(CONFIGS / "validate_example.json")]) == 0
    capsys.readouterr()

    bad_net = _write(tmp_path, "bad_net.json", {
        "m_s": [[0.5, 0.0], [0.0, 0.0]],  # self-holding on the diagonal
        "m_d": [[0.0, 0.0], [0.0, 0.0]],
        "d": [1.0, 1.0],
    })
    cfg = _write(tmp_path, "validate.json",
                 {"kind": "validate", "network": bad_net})
    assert main(["validate", "--config", cfg]) == 1
    assert "FAILED" in capsys.readouterr().out


def test_solver_failure_exit_code(tmp_path, capsys):
    # deep mutual insolvency with nearly-stochastic debt holdings: a handful
    # of Picard steps cannot reach the fixed point
    net_path = tmp_path / "net.json"
    save_network(FirmNetwork(
        m_s=np.zeros((2, 2)),
        m_d=np.array([[0.0, 0.9], [0.9, 0.0]]),
        d=np.ones(2),
    ), net_path)
    cfg = _write(tmp_path, "price.json", {
        "kind": "price", "network": str(net_path), "a_t": 0.05, "sigma": 0.4,
        "draws": 64, "seed": 1, "max_iter": 3,
    })
    assert main(["price", "--config", cfg, "--out", str(tmp_path / "p.json")]) == 3
    assert "solver failure" in capsys.readouterr().err


def test_seed_override_changes_bytes(tmp_path, capsys):
    cfg = _write(tmp_path, "two.json", {
        "kind": "two-firm", "a0": 1.0, "w_d": 0.4, "sigma": 0.4, "d": 1.0,
        "draws": 30,
    })
    a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
    assert main(["two-firm", "--config", cfg, "--out", str(a)]) == 0
    assert main(["two-firm", "--config", cfg, "--out", str(b), "--seed", "0"]) == 0
    assert main(["two-firm", "--config", cfg, "--out", str(c), "--seed", "5"]) == 0
    assert a.read_bytes() == b.read_bytes()  # config default seed is 0
    assert a.read_bytes() != c.read_bytes()


def test_draws_override(tmp_path, capsys):
    cfg = _write(tmp_path, "two.json", {
        "kind": "two-firm", "a0": 1.0, "w_d": 0.4, "sigma": 0.4, "d": 1.0,
        "draws": 30,
    })
    out = tmp_path / "two.csv"
    assert main(["two-firm", "--config", cfg, "--out", str(out), "--draws", "12"]) == 0
    assert len(out.read_text().splitlines()) == 13


def test_threads_override_keeps_output_identical(tmp_path, capsys):
    cfg = _write(tmp_path, "sweep.json", {
        "kind": "er-sweep", "k_mean": [2.0], "w_d": [0.5], "a0": [1.0],
        "sigma": 0.4, "n": 4, "networks": 3, "draws": 64, "seed": 2,
    })
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["er-sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["er-sweep", "--config", cfg, "--out", str(b),
                 "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_greeks_writes_json(tmp_path, capsys):
    cfg = _write(tmp_path, "greeks.json", {
        "kind": "greeks", "network": str(CONFIGS / "example_network.json"),
        "a_t": 1.0, "sigma": 0.4, "draws": 400, "seed": 1,
    })
    out = tmp_path / "g.json"
    assert main(["greeks", "--config", cfg, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["n"] == 3
    assert np.asarray(payload["delta"]).shape == (6, 3)


def test_local_compare_writes_csv(tmp_path, capsys):
    cfg = _write(tmp_path, "local.json", {
        "kind": "local-compare", "network": str(CONFIGS / "debt_network.json"),
        "a_t": 1.05, "sigma": 0.4, "firm_vol": 0.4, "draws": 400, "seed": 2,
    })
    out = tmp_path / "local.csv"
    assert main(["local-compare", "--config", cfg, "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 10  # header + 3x3 pairs


def test_unknown_subcommand_fails():
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", "x.json"])
