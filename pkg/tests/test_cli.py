import json
import subprocess
import sys

import pytest

from fiberent import cli
from fiberent.observables import RECORD_FIELDS
from fiberent.scenarios import PRESET_NAMES
from fiberent.spectra import COUPLING_COLUMNS, VerificationError

QUICK = ["--omega", "0.05", "--omega_mw", "0.0125", "--beta", "0.1"]


def test_list_presets(capsys):
    assert cli.main(["list-presets"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == list(PRESET_NAMES)


def test_spectra_writes_coupling_table(capsys):
    assert cli.main(["spectra"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == ",".join(COUPLING_COLUMNS)
    assert any(line.startswith("ket00,T4,laser,") and line.endswith(",0") for line in out)


def test_spectra_verification_failure_exit_code(monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise VerificationError("phi2: energy off", None)

    monkeypatch.setattr(cli, "verify_spectrum", fail)
    assert cli.main(["spectra"]) == cli.EXIT_VERIFICATION
    assert "phi2" in capsys.readouterr().err


def test_evolve_to_file(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = cli.main(["evolve", *QUICK, "--t_max", "100", "--n_records", "11", "-o", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t," + ",".join(RECORD_FIELDS)
    assert len(lines) == 12
    assert "final_fidelity=" in capsys.readouterr().out


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"omega": 0.05, "omega_mw": 0.0125, "beta": 0.3},
                               "t_max": 50, "n_records": 6}))
    out = tmp_path / "run.csv"
    assert cli.main(["evolve", "--config", str(cfg), "--n-records", "3", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4


def test_sweep_requires_axis(capsys):
    assert cli.main(["sweep", *QUICK, "--record_time", "10"]) == cli.EXIT_CONFIG


def test_sweep_to_stdout(capsys):
    code = cli.main(["sweep", *QUICK, "--axis", "beta+kappa:0:0.1:3", "--record_time", "50"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "beta_kappa,fidelity"
    assert len(lines) == 4


def test_invalid_sweep_field_is_config_error(capsys):
    code = cli.main(["sweep", *QUICK, "--axis", "theta:0:1:3", "--record_time", "50"])
    assert code == cli.EXIT_CONFIG
    assert "theta" in capsys.readouterr().err


def test_negative_rate_is_config_error():
    assert cli.main(["evolve", "--beta", "-0.1"]) == cli.EXIT_CONFIG


def test_missing_config_file_is_config_error(tmp_path):
    assert cli.main(["evolve", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_degenerate_steady_state_exit_code(capsys):
    assert cli.main(["steady", "--beta", "0.1"]) == cli.EXIT_NUMERICAL
    assert "null-space dimension" in capsys.readouterr().err


def test_steady_csv(capsys):
    assert cli.main(["steady", *QUICK]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split(",")[-1] == "photon_traced_fidelity"
    assert len(row.split(",")) == len(RECORD_FIELDS) + 1


def test_preset_show_and_override(capsys):
    assert cli.main(["preset", "fig3b", "--show", "--beta", "0.05"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["params"]["beta"] == 0.05
    assert shown["params"]["delta"] == "auto_T4"
    assert shown["name"] == "fig3b"


def test_unknown_preset_exit_code(capsys):
    assert cli.main(["preset", "fig9"]) == cli.EXIT_CONFIG
    assert "fig6a" in capsys.readouterr().err


def test_exp_check_needs_output(capsys):
    assert cli.main(["preset", "exp_check"]) == cli.EXIT_CONFIG


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fiberent", "list-presets"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "exp_check" in proc.stdout


def test_bad_delta_is_argparse_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["evolve", "--delta", "resonant"])
    assert info.value.code == 2
