import pytest

from haudim.config import parse_config
from haudim.experiments import resolve_workers, run_experiment

SMALL = {
    "level-dim": "[process.1]\nalpha = 1.5\n[params]\nn_steps = 20000\ntrials = 6\n",
    "inverse-dim": "[params]\nn_steps = 20000\ntrials = 6\ncantor_level = 6\n",
    "collision-dim": "[params]\nn_steps = 20000\ntrials = 6\nwithin = intervals\nintervals = -1:1\n",
    "subordinator-check": "[params]\nsamples = 20000\ngamma = 0.7\n",
    "wiener": "[params]\ndesign = transient\ntrials = 150\nreplicates = 2\nmin_agree = 1\n",
}


@pytest.mark.parametrize("kind", sorted(SMALL))
def test_worker_count_does_not_change_csv(kind):
    cfg = parse_config(f"[experiment]\nkind = {kind}\nmaster_seed = 42\n" + SMALL[kind])
    a = run_experiment(cfg, 1)
    b = run_experiment(cfg, 3)
    assert a.csv == b.csv and a.extra == b.extra
    assert a.csv.endswith("\n") and "\r" not in a.csv


def test_seed_changes_output():
    cfg = parse_config("[experiment]\nkind = level-dim\n" + SMALL["level-dim"])
    assert run_experiment(cfg.with_seed(1)).csv != run_experiment(cfg.with_seed(2)).csv


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv("HAUDIM_THREADS", "2")
    assert resolve_workers(16) == 2
    monkeypatch.delenv("HAUDIM_THREADS")
    assert resolve_workers(5) == 5


def test_kernel_check_subordinated():
    cfg = parse_config("[experiment]\nkind = kernel-check\n[params]\nalpha = 2\ngamma = 0.5\n")
    res = run_experiment(cfg)
    assert res.passed and res.csv.startswith("report,t,x,ratio\n")
