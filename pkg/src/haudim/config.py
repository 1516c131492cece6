"""Experiment configuration: INI text with fixed sections.

Grammar (``configparser`` syntax, ``key = value``; ``#`` or ``;`` start comments)::

    [experiment]
    name = brownian-level       # free text, used for the default output dir
    kind = level-dim            # one of KINDS
    master_seed = 12345         # 64-bit unsigned
    out = runs/brownian-level   # optional

    [process.1]                 # as many process blocks as the kind needs
    alpha = 2                   # shorthand for alpha_local = alpha_global
    d = 1                       # shorthand for d_local = d_global
    kind = diffusion            # diffusion | stable_jump | diffusion_with_jumps
    bounds = ODHK,NDLHK,WUHK,HR

    [params]                    # kind-specific; see PARAMS for names and defaults
    n_steps = 1000000
    trials = 20

Every omitted value takes its default; :meth:`ExperimentConfig.echo` writes the
fully resolved configuration back out, and parsing the echo reproduces the
same object.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .scaling import ALL_BOUNDS, Bound, DomainError, ProcessClass, ProcessKind

KINDS = (
    "predict",
    "gamma",
    "level-dim",
    "inverse-dim",
    "collision-dim",
    "kernel-check",
    "subordinator-check",
    "energy",
    "wiener",
)

_SIM = {
    "n_steps": 1_000_000,
    "T": 1.0,
    "trials": 20,
    "gamma": 1.0,
    "window_lo": 0.0,  # 0 selects the default window [16 dt, T/64]
    "window_hi": 0.0,
}

PARAMS: dict[str, dict] = {
    "predict": {"target": "level", "s_F": 1.0, "t_F": 1.0},
    "gamma": {"variant": "single", "s_min": 0.0, "s_max": 0.0, "s_points": 101, "tol": 1e-6},
    "level-dim": {**_SIM, "level": 0.0, "x0": 0.0, "tolerance": 0.07, "empty_fraction": 0.95},
    "inverse-dim": {
        **_SIM,
        "x0": 0.0,
        "target": "cantor",
        "cantor_ratio": 1.0 / 3.0,
        "cantor_level": 12,
        "intervals": "0:1",
        "tolerance": 0.10,
        "empty_fraction": 0.95,
    },
    "collision-dim": {**_SIM, "x0_1": 0.0, "x0_2": 0.0, "within": "none", "intervals": "0:1", "tolerance": 0.08, "empty_fraction": 0.95},
    "kernel-check": {"alpha": 1.5, "gamma": 1.0, "trend_tol": 0.1, "t_decades": 4.0},
    "subordinator-check": {"gamma": 0.5, "t": 1.0, "samples": 1_000_000, "ks_tol": 0.005, "z_max": 3.0},
    "energy": {
        "ratio": 1.0 / 3.0,
        "level_min": 6,
        "level_max": 14,
        "s_min": 0.30,
        "s_max": 0.95,
        "s_step": 0.01,
        "tolerance": 0.05,
    },
    "wiener": {"design": "brownian", "trials": 400, "replicates": 1, "n_max": 8, "min_agree": 1},
}

N_PROCESSES = {"collision-dim": 2, "predict": 1, "wiener": 0, "energy": 0, "kernel-check": 0, "subordinator-check": 0}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessSpec:
    d_local: float = 1.0
    d_global: float = 1.0
    alpha_local: float = 2.0
    alpha_global: float = 2.0
    kind: str = "diffusion"
    bounds: tuple = tuple(sorted(b.value for b in ALL_BOUNDS))

    def build(self) -> ProcessClass:
        return ProcessClass.from_exponents(
            self.d_local, self.alpha_local, self.d_global, self.alpha_global, ProcessKind(self.kind), [Bound(b) for b in self.bounds]
        )

    @classmethod
    def from_section(cls, sec) -> "ProcessSpec":
        known = {"alpha", "d", "d_local", "d_global", "alpha_local", "alpha_global", "kind", "bounds"}
        extra = set(sec) - known
        if extra:
            raise ConfigError(f"unknown process keys: {sorted(extra)}")
        alpha = float(sec.get("alpha", 2.0))
        d = float(sec.get("d", 1.0))
        a_loc = float(sec.get("alpha_local", alpha))
        kind = sec.get("kind", "diffusion" if a_loc >= 2 else "stable_jump").strip()
        bounds = sec.get("bounds")
        bounds = tuple(sorted(b.strip() for b in bounds.split(",") if b.strip())) if bounds else cls.bounds
        return cls(
            float(sec.get("d_local", d)),
            float(sec.get("d_global", sec.get("d_local", d))),
            a_loc,
            float(sec.get("alpha_global", a_loc)),
            kind,
            bounds,
        )


def _coerce(name: str, default, raw: str):
    try:
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            v = float(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"parameter {name!r}: cannot parse {raw!r} as {type(default).__name__}") from None
    return raw.strip()


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    master_seed: int = 0
    processes: tuple = ()
    params: dict = field(default_factory=dict)
    out: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ConfigError("master_seed must be a 64-bit unsigned integer")

    def param(self, key: str):
        return self.params[key]

    def process(self, i: int) -> ProcessClass:
        try:
            return self.processes[i].build()
        except DomainError as e:
            raise ConfigError(f"process.{i + 1}: {e}") from None

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return ExperimentConfig(self.name, self.kind, int(seed), self.processes, dict(self.params), self.out)

    def echo(self) -> str:
        lines = ["[experiment]", f"name = {self.name}", f"kind = {self.kind}", f"master_seed = {self.master_seed}"]
        if self.out:
            lines.append(f"out = {self.out}")
        for i, p in enumerate(self.processes, start=1):
            lines += [
                "",
                f"[process.{i}]",
                f"d_local = {p.d_local!r}",
                f"d_global = {p.d_global!r}",
                f"alpha_local = {p.alpha_local!r}",
                f"alpha_global = {p.alpha_global!r}",
                f"kind = {p.kind}",
                f"bounds = {','.join(p.bounds)}",
            ]
        lines += ["", "[params]"]
        for k in sorted(self.params):
            v = self.params[k]
            lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        return "\n".join(lines) + "\n"


def parse_config(text: str, kind: str | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str  # keep case: T, s_F, ...
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from None
    exp = cp["experiment"] if cp.has_section("experiment") else {}
    cfg_kind = exp.get("kind", "").strip() or None
    if kind and cfg_kind and kind != cfg_kind:
        raise ConfigError(f"config kind {cfg_kind!r} does not match subcommand {kind!r}")
    kind = kind or cfg_kind
    if kind is None:
        raise ConfigError("experiment kind missing")
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}")

    defaults = PARAMS[kind]
    given = dict(cp["params"]) if cp.has_section("params") else {}
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
    params = {k: (_coerce(k, d, given[k]) if k in given else d) for k, d in defaults.items()}

    n_proc = N_PROCESSES.get(kind, 1)
    if kind == "predict" and params["target"] == "collision":
        n_proc = 2
    if kind == "gamma" and params["variant"] == "collision":
        n_proc = 2
    procs = []
    for i in range(1, n_proc + 1):
        sec = f"process.{i}"
        procs.append(ProcessSpec.from_section(cp[sec]) if cp.has_section(sec) else ProcessSpec())
    for sec in cp.sections():
        if sec not in ("experiment", "params") and not sec.startswith("process."):
            raise ConfigError(f"unknown section [{sec}]")

    seed_raw = exp.get("master_seed", "0")
    try:
        seed = int(seed_raw, 0)
    except ValueError:
        raise ConfigError(f"master_seed must be an integer, got {seed_raw!r}") from None
    return ExperimentConfig(
        exp.get("name", kind).strip() or kind, kind, seed, tuple(procs), params, exp.get("out", "").strip()
    )


def load_config(path, kind: str | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text, kind)


def default_config(kind: str) -> ExperimentConfig:
    return parse_config(f"[experiment]\nkind = {kind}\n")


def parse_intervals(spec: str) -> tuple:
    """"a:b, c:d" -> ((a, b), (c, d))."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        lo, hi = part.split(":")
        out.append((float(lo), float(hi)))
    if not out:
        raise ConfigError("empty interval list")
    return tuple(out)


def finite_or_none(x: float) -> float | None:
    return None if (x == 0 or not math.isfinite(x)) else x
