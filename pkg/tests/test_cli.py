"""Command-line interface: contracts, exit codes, determinism."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from tripois import cli, verify
from tripois.catalog import MEASURES, REGIONS
from tripois.io import dumps_json


@pytest.fixture()
def files(tmp_path):
    def write(name, obj):
        path = os.path.join(tmp_path, name)
        with open(path, "w") as handle:
            handle.write(dumps_json(obj))
        return path

    square = MEASURES["uniform-square"]().to_dict()
    return {
        "square_measure": write("square.json", square),
        "star_measure": write("star.json",
                              MEASURES["uniform-star"]().to_dict()),
        "square_region": write("square_region.json",
                               REGIONS["unit-square"]().to_dict()),
        "disk_region": write("disk_region.json",
                             REGIONS["disk"]().to_dict()),
        "config": write("config.json",
                        {"measure": square, "n": 30, "replicates": 10,
                         "seed": 7}),
        "config_zero": write("config_zero.json",
                             {"measure": square, "n": 30, "replicates": 0}),
        "tmp": str(tmp_path),
    }


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# kappa
# ---------------------------------------------------------------------------

def test_kappa_closed_json_contract(files, capsys):
    code, out, _ = run_cli(
        ["kappa", files["square_measure"], "--method", "closed"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert set(obj) == {"kappa", "se", "method", "measure"}
    assert obj["kappa"] == 2
    assert obj["se"] == 0
    assert obj["method"] == "closed_form"
    assert obj["measure"]["kind"] == "uniform"


def test_kappa_all_reports_agreement(files, capsys):
    code, out, _ = run_cli(
        ["kappa", files["square_measure"], "--samples", "100000"], capsys)
    assert code == 0
    obj = json.loads(out)
    methods = [row["method"] for row in obj["results"]]
    assert methods == ["closed_form", "quadrature", "monte_carlo"]
    assert len(obj["agreement"]) == 3
    assert all(row["ok"] for row in obj["agreement"])


def test_kappa_closed_unavailable_is_input_error(files, capsys):
    code, _out, err = run_cli(
        ["kappa", files["star_measure"], "--method", "closed"], capsys)
    assert code == 2
    assert "closed form" in err


def test_kappa_all_without_closed_form_still_works(files, capsys):
    code, out, _ = run_cli(
        ["kappa", files["star_measure"], "--samples", "50000"], capsys)
    assert code == 0
    obj = json.loads(out)
    methods = [row["method"] for row in obj["results"]]
    assert methods == ["quadrature", "monte_carlo"]
    assert len(obj["agreement"]) == 1


def test_kappa_mc_seed_changes_result(files, capsys):
    _, out_a, _ = run_cli(["kappa", files["square_measure"], "--method",
                           "mc", "--samples", "50000", "--seed", "1"],
                          capsys)
    _, out_b, _ = run_cli(["kappa", files["square_measure"], "--method",
                           "mc", "--samples", "50000", "--seed", "1"],
                          capsys)
    _, out_c, _ = run_cli(["kappa", files["square_measure"], "--method",
                           "mc", "--samples", "50000", "--seed", "2"],
                          capsys)
    assert out_a == out_b
    assert json.loads(out_a)["kappa"] != json.loads(out_c)["kappa"]


def test_kappa_malformed_file(files, capsys, tmp_path):
    bad = os.path.join(tmp_path, "bad.json")
    with open(bad, "w") as handle:
        handle.write("{broken")
    code, _, err = run_cli(["kappa", bad], capsys)
    assert code == 2
    assert "JSON" in err
    code, _, _ = run_cli(
        ["kappa", os.path.join(tmp_path, "missing.json")], capsys)
    assert code == 4


# ---------------------------------------------------------------------------
# crofton
# ---------------------------------------------------------------------------

def test_crofton_default_rows(files, capsys):
    code, out, _ = run_cli(["crofton", files["square_region"]], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "p,I"
    rows = [line.split(",") for line in lines[1:]]
    assert [float(r[0]) for r in rows] == [1.0, 3.0]
    assert float(rows[0][1]) == pytest.approx(np.pi, rel=1e-8)
    assert float(rows[1][1]) == pytest.approx(3.0, rel=1e-7)


def test_crofton_disk_cubic_identity(files, capsys):
    code, out, _ = run_cli(
        ["crofton", files["disk_region"], "--p", "3"], capsys)
    assert code == 0
    value = float(out.strip().split("\n")[1].split(",")[1])
    assert value == pytest.approx(3.0 * np.pi ** 2, rel=1e-7)


def test_crofton_rejects_bad_powers(files, capsys):
    for p in ("0", "-1", "1,0.5,0", "abc", ""):
        code, _, err = run_cli(
            ["crofton", files["square_region"], "--p", p], capsys)
        assert code == 2, p
        assert "p" in err


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_writes_outputs_and_summary_line(files, capsys):
    out_dir = os.path.join(files["tmp"], "run1")
    code, out, err = run_cli(
        ["simulate", files["config"], "--out", out_dir], capsys)
    assert code == 0
    assert os.path.isfile(os.path.join(out_dir, "replicates.csv"))
    assert os.path.isfile(os.path.join(out_dir, "summary.json"))
    line = out.strip()
    assert line.startswith("kappa_hat=")
    assert "ks_D=" in line and "tv_alpha2=" in line
    assert "wrote" in err  # timing goes to stderr, not stdout
    with open(os.path.join(out_dir, "summary.json")) as handle:
        summary = json.load(handle)
    assert summary["kappa_reference"] == 2
    assert summary["n"] == 30


def test_simulate_rerun_byte_identical(files, capsys):
    out_a = os.path.join(files["tmp"], "runA")
    out_b = os.path.join(files["tmp"], "runB")
    assert run_cli(["simulate", files["config"], "--out", out_a],
                   capsys)[0] == 0
    assert run_cli(["simulate", files["config"], "--out", out_b],
                   capsys)[0] == 0
    for name in ("replicates.csv", "summary.json"):
        with open(os.path.join(out_a, name), "rb") as handle:
            blob_a = handle.read()
        with open(os.path.join(out_b, name), "rb") as handle:
            blob_b = handle.read()
        assert blob_a == blob_b, name


def test_simulate_threads_flag_does_not_change_outputs(files, capsys):
    out_a = os.path.join(files["tmp"], "thr1")
    out_b = os.path.join(files["tmp"], "thr2")
    run_cli(["simulate", files["config"], "--out", out_a, "--threads", "1"],
            capsys)
    run_cli(["simulate", files["config"], "--out", out_b, "--threads", "3"],
            capsys)
    with open(os.path.join(out_a, "replicates.csv"), "rb") as handle:
        blob_a = handle.read()
    with open(os.path.join(out_b, "replicates.csv"), "rb") as handle:
        blob_b = handle.read()
    assert blob_a == blob_b


def test_simulate_zero_replicates_is_input_error(files, capsys):
    code, _, err = run_cli(
        ["simulate", files["config_zero"],
         "--out", os.path.join(files["tmp"], "never")], capsys)
    assert code == 2
    assert "replicate" in err


def test_simulate_unwritable_out_is_io_error(files, capsys):
    code, _, _ = run_cli(
        ["simulate", files["config"], "--out", "/dev/null/impossible"],
        capsys)
    assert code == 4


# ---------------------------------------------------------------------------
# pi
# ---------------------------------------------------------------------------

def test_pi_json_contract(files, capsys):
    code, out, _ = run_cli(
        ["pi", files["square_measure"], "--beta", "0.001",
         "--samples", "50000", "--seed", "3"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["beta"] == 0.001
    assert obj["samples"] == 50000 and obj["seed"] == 3
    for key in ("pi", "pi1", "pi2"):
        block = obj[key]
        assert set(block) == {"estimate", "se", "hits", "draws"}
        assert block["draws"] == 50000
        assert block["estimate"] == block["hits"] / block["draws"]
    # The probability of two triangles is at most the probability of one.
    assert obj["pi1"]["estimate"] <= obj["pi"]["estimate"]


def test_pi_rejects_bad_beta(files, capsys):
    code, _, err = run_cli(
        ["pi", files["square_measure"], "--beta", "0"], capsys)
    assert code == 2
    assert "beta" in err


# ---------------------------------------------------------------------------
# verify (restricted to the fast first criterion for the negative control)
# ---------------------------------------------------------------------------

@pytest.fixture()
def only_first_criterion(monkeypatch):
    first = next(c for c in verify.CRITERIA if c.ident == "1")
    monkeypatch.setattr(verify, "CRITERIA", [first])
    monkeypatch.delenv(verify.FAULT_ENV_VAR, raising=False)


def test_verify_clean_build_exits_zero(only_first_criterion, capsys):
    code, out, _ = run_cli(["verify", "--suite", "core"], capsys)
    assert code == 0
    assert "[  1] PASS" in out
    assert "1/1 criteria passed" in out


def test_verify_injected_fault_names_criterion(only_first_criterion,
                                               monkeypatch, capsys):
    monkeypatch.setenv(verify.FAULT_ENV_VAR, "1.01")
    code, out, _ = run_cli(["verify", "--suite", "core"], capsys)
    assert code == 1
    assert "[  1] FAIL" in out
    assert "FAILED: three-way kappa agreement" in out


def test_verify_extended_prints_runtime(only_first_criterion, capsys):
    code, out, _ = run_cli(["verify", "--suite", "extended"], capsys)
    assert code == 0
    import re
    assert re.search(r"\[  1\] PASS\s+\d+\.\d\ds", out)


def test_verify_rejects_unknown_suite(capsys):
    code, _, _ = run_cli(["verify", "--suite", "everything"], capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------

def test_plot_kinds_and_errors(files, capsys):
    out_dir = os.path.join(files["tmp"], "plots")
    assert run_cli(["simulate", files["config"], "--out", out_dir],
                   capsys)[0] == 0
    code, out, _ = run_cli(["plot", out_dir], capsys)
    assert code == 0
    for name in ("hist.svg", "qq.svg", "counts_alpha2.svg"):
        assert os.path.isfile(os.path.join(out_dir, name)), name
    with open(os.path.join(out_dir, "hist.svg")) as handle:
        svg = handle.read()
    assert svg.startswith("<svg")
    assert "<polyline" in svg and "<desc>" in svg
    # Selecting one kind writes only that kind.
    qq_dir = os.path.join(files["tmp"], "plots_qq")
    run_cli(["simulate", files["config"], "--out", qq_dir], capsys)
    code, _, _ = run_cli(["plot", qq_dir, "--kind", "qq"], capsys)
    assert code == 0
    assert os.path.isfile(os.path.join(qq_dir, "qq.svg"))
    assert not os.path.isfile(os.path.join(qq_dir, "hist.svg"))


def test_plot_deterministic_bytes(files, capsys):
    out_dir = os.path.join(files["tmp"], "plots_det")
    run_cli(["simulate", files["config"], "--out", out_dir], capsys)
    run_cli(["plot", out_dir, "--kind", "hist"], capsys)
    with open(os.path.join(out_dir, "hist.svg"), "rb") as handle:
        first = handle.read()
    run_cli(["plot", out_dir, "--kind", "hist"], capsys)
    with open(os.path.join(out_dir, "hist.svg"), "rb") as handle:
        assert handle.read() == first


def test_plot_missing_or_empty_dir_is_io_error(files, capsys):
    code, _, _ = run_cli(
        ["plot", os.path.join(files["tmp"], "nowhere")], capsys)
    assert code == 4
    empty = os.path.join(files["tmp"], "empty")
    os.makedirs(empty)
    code, _, _ = run_cli(["plot", empty], capsys)
    assert code == 4


def test_plot_rejects_unknown_kind(files, capsys):
    code, _, _ = run_cli(
        ["plot", files["tmp"], "--kind", "pie"], capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def test_no_subcommand_is_input_error(capsys):
    assert cli.main([]) == 2
    capsys.readouterr()


def test_unknown_subcommand_is_input_error(capsys):
    assert cli.main(["frobnicate"]) == 2
    capsys.readouterr()


def test_module_entry_point(files):
    # The installed package is runnable as python -m with identical
    # behaviour to the in-process entry.
    proc = subprocess.run(
        [sys.executable, "-m", "tripois", "kappa", files["square_measure"],
         "--method", "closed"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kappa"] == 2
