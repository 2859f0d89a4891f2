import os
import subprocess
import sys

import pytest

from oialab import cli
from oialab.errors import NumericalError


def test_runs_and_writes(tmp_path, capsys):
    rc = cli.main(["upa-vs-opa", "--n1", "3", "--m1", "3", "--n2", "3", "--m2", "3",
                   "--snr-min", "0", "--snr-max", "10", "--snr-step", "5", "--trials", "3",
                   "--out", str(tmp_path), "--emit-plot-script"], environ={})
    assert rc == 0
    text = (tmp_path / "upa-vs-opa.csv").read_text()
    assert "# seed: 0" in text
    assert len([l for l in text.splitlines() if not l.startswith("#")]) == 1 + 3
    assert (tmp_path / "upa-vs-opa.gp").exists()


def test_seed_from_environment(tmp_path):
    rc = cli.main(["to-fraction", "--trials", "2", "--snr", "0", "--out", str(tmp_path)],
                  environ={"OIA_SEED": "42"})
    assert rc == 0 and "# seed: 42" in (tmp_path / "to-fraction.csv").read_text()
    rc = cli.main(["to-fraction", "--trials", "2", "--snr", "0", "--seed", "5", "--out", str(tmp_path)],
                  environ={"OIA_SEED": "42"})
    assert "# seed: 5" in (tmp_path / "to-fraction.csv").read_text()


@pytest.mark.parametrize("argv", [
    ["upa-vs-opa", "--trials", "0"],
    ["upa-vs-opa", "--n1", "3"],
    ["upa-vs-opa", "--snr-step", "-1"],
    ["upa-vs-opa", "--n1", "3", "--m1", "3", "--n2", "3", "--m2", "3", "--alpha11", "1"],
    ["asymptote-convergence", "--alpha11", "2", "--trials", "1", "--sizes", "4"],
])
def test_invalid_spec_exit_code(argv, tmp_path, capsys):
    assert cli.main(argv + ["--out", str(tmp_path)], environ={}) == 1
    assert "invalid specification" in capsys.readouterr().err


def test_bad_seed_env(tmp_path):
    assert cli.main(["to-fraction", "--out", str(tmp_path)], environ={"OIA_SEED": "x"}) == 1


def test_argparse_errors_exit_1():
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-experiment"])
    assert info.value.code == 1


def test_numerical_failure_exit_code(monkeypatch, tmp_path, capsys):
    def boom(spec, workers=1):
        raise NumericalError("asymptotic_rate", "did not converge", residual=1.0)
    monkeypatch.setattr(cli, "run", boom)
    assert cli.main(["asymptote-convergence", "--out", str(tmp_path)], environ={}) == 2
    assert "asymptotic_rate" in capsys.readouterr().err


def test_snr_grid():
    assert cli.snr_grid(0, 40, 2)[-1] == 40.0
    assert len(cli.snr_grid(0, 1, 0.1)) == 11


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "oialab.cli", "to-fraction", "--trials", "1",
                          "--snr", "10", "--out", str(tmp_path)],
                         capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0, out.stderr
