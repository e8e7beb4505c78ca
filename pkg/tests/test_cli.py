import json
import shutil
import subprocess

import pytest

from spdbreak.cli import (
    EXIT_MISMATCH,
    EXIT_NONCONVERGED,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    main,
)


def run(tmp_path, *args):
    return main([*args, "--outdir", str(tmp_path)])


# -- config ----------------------------------------------------------------------


def test_config_round_trip():
    cfg = RunConfig(mode="sp", symmetry="J1", Z=3.0, seed=7)
    assert RunConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("data", [{"colour": "red"}, {"n_points": 220.0}, {"Z": "4"}, {"mode": "spd"}, {"Z": -1.0}])
def test_config_rejects_bad_input(data):
    with pytest.raises(ValueError):
        RunConfig.from_dict(data)


def test_hash_ignores_outdir_only():
    a, b = RunConfig(outdir="x"), RunConfig(outdir="y")
    assert a.manifest_hash("solve") == b.manifest_hash("solve")
    assert a.manifest_hash("solve") != RunConfig(seed=1).manifest_hash("solve")
    assert a.manifest_hash("solve") != a.manifest_hash("ci")


# -- usage errors -----------------------------------------------------------------


@pytest.mark.parametrize(
    "args",
    [
        ["solve", "--bogus", "1"],
        ["solve", "--mode", "sp", "--symmetry", "3D1"],
        ["solve", "--n_points", "many"],
        ["verify", "nothing"],
        [],
    ],
)
def test_usage_errors_exit_1(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_USAGE


def test_unknown_config_key_exits_1(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"mode": "sp", "tolerance": 1}))
    assert run(tmp_path, "solve", "--config", str(path)) == EXIT_USAGE


def test_ci_without_orbitals_names_the_producing_command(tmp_path, capsys):
    assert run(tmp_path, "ci", "--orbitals", str(tmp_path / "missing" / "orbitals.csv")) == EXIT_USAGE
    assert "spdbreak solve --mode sp+pd --symmetry 3P1" in capsys.readouterr().err


# -- solve --------------------------------------------------------------------------


def test_solve_writes_artifacts(tmp_path, capsys):
    assert run(tmp_path, "solve", "--mode", "sp", "--symmetry", "J1") == EXIT_OK
    out = capsys.readouterr().out
    assert "classification = 3P1" in out
    h = RunConfig(mode="sp", symmetry="J1").manifest_hash("solve")
    for name in ("orbitals.csv", "trace.csv", "energy.report", "manifest"):
        first = (tmp_path / name).read_text().splitlines()[0]
        assert first.startswith(f"# manifest={h}")
    manifest = (tmp_path / "manifest").read_text()
    assert "converged = true" in manifest and "config.mode = sp" in manifest


def test_solve_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "solve", "--mode", "sp", "--symmetry", "3P1") == EXIT_OK
    for name in ("orbitals.csv", "trace.csv", "energy.report"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(RunConfig(mode="sp", symmetry="3P1", max_iter=0).to_json())
    assert run(tmp_path, "solve", "--config", str(path)) == EXIT_NONCONVERGED
    assert "converged = false" in (tmp_path / "manifest").read_text()
    assert run(tmp_path, "solve", "--config", str(path), "--max_iter", "3000") == EXIT_OK


# -- verify / ci ---------------------------------------------------------------------


def test_verify_breaking_in_sp_mode_matches_expectation(tmp_path):
    assert run(tmp_path, "verify", "breaking", "--mode", "sp") == EXIT_OK
    assert "verdict = fails" in (tmp_path / "condition.breaking.report").read_text()


@pytest.mark.parametrize("which", ["3p1", "3d1", "hund"])
def test_verify_checks_hold(tmp_path, which):
    assert run(tmp_path, "verify", which) == EXIT_OK
    assert "verdict = holds" in (tmp_path / f"condition.{which}.report").read_text()


def test_verify_3p1_writes_profile(tmp_path):
    run(tmp_path, "verify", "3p1")
    head = (tmp_path / "F_over_R2.csv").read_text().splitlines()[0]
    assert head.startswith("# manifest=") and "F_over_R2" in head


def test_verify_breaking_sp_pd_reports_mismatch(tmp_path):
    # the weight criterion is not met at the J=1 minimiser
    assert run(tmp_path, "verify", "breaking") == EXIT_MISMATCH
    text = (tmp_path / "condition.breaking.report").read_text()
    assert "energy_criterion = true" in text and "weight_criterion = false" in text


def test_ci_table(tmp_path, capsys):
    assert run(tmp_path, "solve") == EXIT_OK
    capsys.readouterr()
    assert run(tmp_path, "ci", "--orbitals", str(tmp_path / "orbitals.csv")) == EXIT_OK
    out = capsys.readouterr().out
    for label in ("λ1(3P1)", "λ2(3P1)", "λ1(1P1)", "λ2(1P1)", "λ(3D1)", "off_block_max", "hund_ordering λ1(3P1) < λ1(1P1): true"):
        assert label in out


@pytest.mark.skipif(shutil.which("spdbreak") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["spdbreak", "solve", "--nope"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
    proc = subprocess.run(["spdbreak", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
