import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haudim.config import KINDS, ConfigError, default_config, parse_config, parse_intervals


@pytest.mark.parametrize("kind", KINDS)
def test_echo_roundtrip_defaults(kind):
    cfg = default_config(kind)
    assert parse_config(cfg.echo()) == cfg


@given(seed=st.integers(0, 2**64 - 1), trials=st.integers(1, 500), t=st.floats(0.01, 100))
@settings(max_examples=30)
def test_echo_roundtrip_values(seed, trials, t):
    text = f"[experiment]\nkind = level-dim\nmaster_seed = {seed}\n[process.1]\nalpha = 1.5\n[params]\ntrials = {trials}\nT = {t!r}\n"
    cfg = parse_config(text)
    assert cfg.param("T") == t and cfg.param("trials") == trials
    assert parse_config(cfg.echo()) == cfg


def test_shorthand_and_kind_default():
    cfg = parse_config("[experiment]\nkind = predict\n[process.1]\nalpha = 1.5  # stable\nd = 1\n")
    p = cfg.process(0)
    assert p.scale.alpha_local == p.scale.alpha_global == 1.5 and p.kind.value == "stable_jump"


@pytest.mark.parametrize(
    "text",
    [
        "[experiment]\nkind = nope\n",
        "[experiment]\nkind = energy\n[params]\nbogus = 1\n",
        "[experiment]\nkind = energy\n[extra]\nx = 1\n",
        "[experiment]\nkind = level-dim\n[params]\ntrials = 2.5\n",
        "[experiment]\nkind = energy\nmaster_seed = -1\n",
        "no section header",
    ],
)
def test_rejects_bad_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_kind_mismatch():
    with pytest.raises(ConfigError):
        parse_config("[experiment]\nkind = energy\n", kind="wiener")


def test_intervals():
    assert parse_intervals("0:1, 2.5:3") == ((0.0, 1.0), (2.5, 3.0))
    with pytest.raises(ConfigError):
        parse_intervals(" , ")
