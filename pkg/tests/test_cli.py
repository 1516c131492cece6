import pytest

from haudim.cli import EXIT_ASSERT, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from haudim.config import parse_config


def write(tmp_path, text):
    p = tmp_path / "c.ini"
    p.write_text(text)
    return str(p)


def test_predict_writes_artifacts(tmp_path, capsys):
    cfg = write(tmp_path, "[experiment]\nname = bm\nkind = predict\n[process.1]\nalpha = 2\n")
    out = tmp_path / "run"
    assert main(["predict", "--config", cfg, "--out", str(out), "--seed", "9"]) == EXIT_OK
    assert "predicted 0.5" in (out / "report.txt").read_text()
    raw = (out / "result.csv").read_bytes()
    assert b"\r" not in raw and raw.startswith(b"target,value")
    echo = parse_config((out / "config.echo").read_text())
    assert echo.master_seed == 9 and echo.out == str(out)
    assert "predicted 0.5" in capsys.readouterr().out


def test_gamma_csv(tmp_path):
    out = tmp_path / "g"
    assert main(["gamma", "--out", str(out), "-q", "--assert"]) == EXIT_OK
    header = (out / "result.csv").read_text().splitlines()[0]
    assert header == "s,gamma_closed,gamma_numeric,abs_diff"


def test_assert_failure_exit(tmp_path):
    # an impossible tolerance turns the report into a failure
    cfg = write(tmp_path, "[experiment]\nkind = energy\n[params]\ntolerance = 0.0001\n")
    assert main(["energy", "--config", cfg, "--out", str(tmp_path / "e"), "-q"]) == EXIT_OK
    assert main(["energy", "--config", cfg, "--out", str(tmp_path / "e"), "-q", "--assert"]) == EXIT_ASSERT


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["not-a-kind"])
    assert e.value.code == EXIT_USAGE
    assert main(["energy", "--config", str(tmp_path / "missing.ini"), "-q"]) == EXIT_USAGE
    bad = write(tmp_path, "[experiment]\nkind = energy\n")
    assert main(["wiener", "--config", bad, "-q"]) == EXIT_USAGE


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["predict", "--out", str(blocker / "sub"), "-q"]) == EXIT_IO


def test_threads_env_must_be_integer(tmp_path, monkeypatch):
    monkeypatch.setenv("HAUDIM_THREADS", "lots")
    assert main(["predict", "--out", str(tmp_path), "-q"]) == EXIT_USAGE
