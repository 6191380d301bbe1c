"""End-to-end runs of the command line through an in-process main()."""

import json
import math

import pytest

from qzw.cli import main
from qzw.lattice import Configuration
from qzw.report import read_table

REF_DIAG = 0.011726758356215906  # kernel at (+:1, +:1), frozen in test_limit_kernel


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_kernel_eval_csv(tmp_path):
    assert run(tmp_path, "kernel", "eval", "--x", "+:1") == 0
    meta, columns, rows = read_table(tmp_path / "kernel_eval.csv")
    assert columns == ["x", "y", "K"]
    assert meta["alpha"] == [1.0, 1.0] and meta["q"] == 0.5
    assert rows == [["+:1", "+:1", repr(REF_DIAG)]]


def test_kernel_eval_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["kernel", "eval", "--x=-:2", "--y", "+:3", "--out", str(a)]) == 0
    assert main(["kernel", "eval", "--x=-:2", "--y", "+:3", "--out", str(b)]) == 0
    assert (a / "kernel_eval.csv").read_bytes() == (b / "kernel_eval.csv").read_bytes()


def test_links_row_export(tmp_path):
    assert run(tmp_path, "links", "row", "--points=-:0,+:1") == 0
    d = json.loads((tmp_path / "links_row.json").read_text())
    probs = [e["probability"] for e in d["entries"]]
    assert all(p > 0 for p in probs)
    assert math.fsum(probs) == pytest.approx(d["mass"], rel=1e-15)
    assert abs(d["mass"] - 1.0) <= d["tail_mass_bound"] + 1e-11
    y = Configuration.from_json(json.dumps(d["entries"][0]["configuration"]))
    assert len(y) == 1


def test_links_compose_monte_carlo_errors(tmp_path):
    assert run(
        tmp_path, "links", "compose", "--points=-:0,-:1,-:2,-:3,-:4,-:5",
        "--level", "1", "--strategy", "monte_carlo", "--paths", "500", "--seed", "3",
    ) == 0
    d = json.loads((tmp_path / "links_compose.json").read_text())
    assert d["strategy"] == "monte_carlo"
    assert all("standard_error" in e for e in d["entries"])


def test_verify_branching_gate(tmp_path):
    assert run(
        tmp_path, "links", "verify-branching", "--points=-:0,-:2,+:1",
        "--level", "2", "--signature", "2,1",
    ) == 0


def test_config_error_names_admissibility(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(
        {"quadruple": {"alpha": [1, 1], "beta": [1, -1], "gamma": 0.5, "delta": 0.5}}
    ))
    rc = run(tmp_path, "kernel", "eval", "--x", "+:1", "--config", str(cfg))
    assert rc == 1
    assert "admissible and nondegenerate" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"quadrupel": {}}))
    assert run(tmp_path, "kernel", "eval", "--x", "+:1", "--config", str(cfg)) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_reference_config_accepted(tmp_path):
    assert run(
        tmp_path, "kernel", "eval", "--x", "+:1", "--config", "configs/reference.json"
    ) == 0


def test_malformed_points_rejected(tmp_path, capsys):
    assert run(tmp_path, "links", "row", "--points=1,2") == 1
    assert "expected '+:m' or '-:m'" in capsys.readouterr().err


def test_kernel_converge_artifacts(tmp_path):
    assert run(
        tmp_path, "kernel", "converge", "--x", "+:0", "--y", "+:3",
        "--schedule", "10,15,20",
    ) == 0
    meta, _, rows = read_table(tmp_path / "kernel_converge.csv")
    gaps = [float(r[3]) for r in rows]
    assert gaps[2] < gaps[1] < gaps[0]
    assert (tmp_path / "kernel_converge.png").exists()


def test_no_figures_flag(tmp_path):
    assert run(
        tmp_path, "kernel", "converge", "--x", "+:0", "--schedule", "10,15",
        "--no-figures",
    ) == 0
    assert not (tmp_path / "kernel_converge.png").exists()


def test_kernel_correlations_artifacts(tmp_path):
    assert run(
        tmp_path, "kernel", "correlations", "--points=+:0,+:3", "--schedule", "10,20",
    ) == 0
    _, columns, rows = read_table(tmp_path / "kernel_correlations.csv")
    assert columns == ["N", "det_N", "det_limit", "gap"]
    assert float(rows[1][3]) < float(rows[0][3])
    assert (tmp_path / "kernel_correlations.png").exists()


def test_boundary_approx_stabilizes(tmp_path):
    assert run(
        tmp_path, "boundary", "approx", "--prefix=-:0,-:1,-:2,-:3,-:4",
        "--level", "2", "--schedule", "3,4,5",
    ) == 0
    meta, _, rows = read_table(tmp_path / "boundary_approx.csv")
    # consecutive exponents make every row deterministic
    assert meta["stabilized"] is True
    assert [r[4] for r in rows] == ["", "0.0", "0.0"]
    assert (tmp_path / "boundary_approx.png").exists()


def test_zw_sample_artifacts(tmp_path):
    assert run(
        tmp_path, "zw", "sample", "--level", "2", "--draws", "200", "--seed", "7",
    ) == 0
    meta, _, rows = read_table(tmp_path / "zw_sample.csv")
    assert meta["draws"] == 200 and meta["seed"] == 7
    assert sum(int(r[1]) for r in rows) == 200
    assert (tmp_path / "zw_sample.png").exists()


def test_zw_kernel_window(tmp_path):
    assert run(tmp_path, "zw", "kernel", "--level", "3", "--points=+:0,+:2,-:1") == 0
    meta, _, rows = read_table(tmp_path / "zw_kernel.csv")
    assert len(rows) == 6  # unordered pairs with the diagonal
    assert meta["level"] == 3


def test_zw_verify_coherency_gate(tmp_path):
    assert run(tmp_path, "zw", "verify-coherency", "--level", "2", "--count", "3") == 0
    _, _, rows = read_table(tmp_path / "zw_coherency.csv")
    assert all(float(r[3]) < 1e-6 for r in rows)


def test_pbqj_verify_gate(tmp_path):
    assert run(tmp_path, "pbqj", "verify", "--set", "gram") == 0
    _, _, rows = read_table(tmp_path / "pbqj_verify.csv")
    assert [r[1] for r in rows] == ["orthogonality", "h0", "backward-shift"]
    assert all(r[4] == "true" for r in rows)


def test_verify_all_subset(tmp_path):
    assert run(tmp_path, "verify-all", "--only", "3,9") == 0
    _, _, rows = read_table(tmp_path / "verify_all.csv")
    assert [int(r[0]) for r in rows] == [3, 9]
    assert all(r[2] == "true" for r in rows)
