import subprocess
import sys

import pytest

from gdr import __version__
from gdr.cli import main, sweep_path

CFG = """algo = es_gdr
env = static_target
generations = 3
lambda = 6
mu = 3
sigma = 0.5
hidden = 4
n_steps = 4
batch_size = 8
eval_every = 1
"""


def test_run_and_seed_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CFG)
    out = tmp_path / "a.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().count("\n") == 4
    other = tmp_path / "b.csv"
    assert main(["run", "--config", str(cfg), "--seed", "5", "--out", str(other)]) == 0
    assert other.read_text() != out.read_text()


def test_sweep_writes_one_file_per_value(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CFG)
    base = tmp_path / "res.csv"
    assert main(["sweep", "--config", str(cfg), "--key", "epsilon", "--values", "0.1,0", "--out", str(base)]) == 0
    assert (tmp_path / "res_epsilon-0.1.csv").exists() and (tmp_path / "res_epsilon-0.csv").exists()
    assert sweep_path("x/out.csv", "sigma", "2") == "x/out_sigma-2.csv"


def test_config_errors_exit_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("algo = es\nwhat = 1\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert "line 2: unknown key: what" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 1
    good = tmp_path / "good.cfg"
    good.write_text(CFG)
    assert main(["sweep", "--config", str(good), "--key", "sigma", "--values", "-1"]) == 1


def test_unwritable_output_exit_1(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CFG)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "no" / "x.csv")]) == 1


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_numeric_abort_exit_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CFG.replace("sigma = 0.5", "sigma = 1e308"))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "numeric abort" in capsys.readouterr().err


def test_gradcheck_and_version(capsys):
    assert main(["gradcheck", "--instances", "2"]) == 0
    assert "actor_squared_l2" in capsys.readouterr().out
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gdr", "version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__
