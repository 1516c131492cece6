"""Sample paths of symmetric stable processes on the line.

Conventions: the alpha = 2 case has generator Laplacian (not half of it),
so every increment over dt has characteristic function exp(-dt |xi|**alpha)
for all alpha in (0, 2].  Subordinating by a gamma-stable subordinator with
Laplace exponent lam**gamma then gives exactly exp(-t |xi|**(alpha gamma)).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scaling import DomainError
from .seeds import blocked, seed_derivation
from .subordinator import kanter_unit


@dataclass(frozen=True)
class PathSpec:
    alpha: float
    T: float = 1.0
    n_steps: int = 1000
    x0: float = 0.0

    def __post_init__(self):
        if not (0 < self.alpha <= 2):
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.T > 0:
            raise DomainError("horizon T must be positive")
        if int(self.n_steps) < 2:
            raise DomainError("n_steps must be at least 2")

    @property
    def dt(self) -> float:
        return self.T / self.n_steps


@dataclass
class SamplePath:
    dt: float
    states: np.ndarray
    alpha: float = float("nan")
    gamma: float = 1.0
    seed: int = 0

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.states))

    @property
    def T(self) -> float:
        return self.dt * self.n_steps


@dataclass
class ProductPath:
    first: SamplePath
    second: SamplePath

    def __post_init__(self):
        if self.first.n_steps != self.second.n_steps or self.first.dt != self.second.dt:
            raise ValueError("product components must share the time grid")

    @property
    def dt(self) -> float:
        return self.first.dt

    @property
    def n_steps(self) -> int:
        return self.first.n_steps


def symmetric_stable_unit(rng: np.random.Generator, alpha: float, size: int) -> np.ndarray:
    """Variates with E exp(i xi S) = exp(-|xi|**alpha) (Chambers-Mallows-Stuck)."""
    if alpha == 2.0:
        return rng.standard_normal(size) * math.sqrt(2.0)
    v = rng.uniform(-math.pi / 2, math.pi / 2, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(v)
    a = alpha
    return np.sin(a * v) / np.cos(v) ** (1.0 / a) * (np.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a)


def stable_increments(alpha: float, elapsed, seed: int) -> np.ndarray:
    """Independent increments over the given elapsed times (array or scalar dt)."""
    elapsed = np.asarray(elapsed, float)
    n = elapsed.size
    unit = blocked(seed, n, lambda rng, m: symmetric_stable_unit(rng, alpha, m))
    return unit * elapsed.reshape(-1) ** (1.0 / alpha)


def _assemble(x0: float, inc: np.ndarray) -> np.ndarray:
    states = np.empty(len(inc) + 1)
    states[0] = x0
    np.cumsum(inc, out=states[1:])
    states[1:] += x0
    return states


def sample_stable_path(spec: PathSpec, seed: int) -> SamplePath:
    n = int(spec.n_steps)
    dt = spec.dt
    unit = blocked(seed, n, lambda rng, m: symmetric_stable_unit(rng, spec.alpha, m))
    inc = unit * dt ** (1.0 / spec.alpha)
    return SamplePath(dt, _assemble(spec.x0, inc), spec.alpha, 1.0, seed)


def subordinate_path(base: PathSpec, gamma: float, seed: int) -> SamplePath:
    """X_{tau_t} on the uniform outer clock of ``base``."""
    if not (0 < gamma <= 1):
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if gamma == 1.0:
        path = sample_stable_path(base, seed)
        return path
    n = int(base.n_steps)
    dt = base.dt
    dtau = dt ** (1.0 / gamma) * blocked(
        seed_derivation(seed, 0), n, lambda rng, m: kanter_unit(rng, gamma, m)
    )
    unit = blocked(seed_derivation(seed, 1), n, lambda rng, m: symmetric_stable_unit(rng, base.alpha, m))
    inc = unit * dtau ** (1.0 / base.alpha)
    return SamplePath(dt, _assemble(base.x0, inc), base.alpha, gamma, seed)


def product_path(spec1: PathSpec, spec2: PathSpec, seed: int, gamma: float = 1.0) -> ProductPath:
    """Two independent components; with gamma < 1 both share one subordinator clock."""
    if spec1.n_steps != spec2.n_steps or spec1.T != spec2.T:
        raise ValueError("product components need equal T and n_steps")
    if gamma == 1.0:
        a = sample_stable_path(spec1, seed_derivation(seed, 1))
        b = sample_stable_path(spec2, seed_derivation(seed, 2))
        return ProductPath(a, b)
    n, dt = int(spec1.n_steps), spec1.dt
    dtau = dt ** (1.0 / gamma) * blocked(seed_derivation(seed, 0), n, lambda rng, m: kanter_unit(rng, gamma, m))
    comps = []
    for i, spec in enumerate((spec1, spec2), start=1):
        s = seed_derivation(seed, i)
        inc = stable_increments(spec.alpha, dtau, s)
        comps.append(SamplePath(dt, _assemble(spec.x0, inc), spec.alpha, gamma, s))
    return ProductPath(*comps)


# ---------------------------------------------------------------------------
# binary dump

MAGIC = b"HDLB"
VERSION = 1
_HEADER = struct.Struct("<4sIQddd Q")


def dump_path(path: SamplePath, dest) -> None:
    """Header {magic, version u32, n_steps u64, dt f64, alpha f64, gamma f64, seed u64}, then LE f64 states."""
    header = _HEADER.pack(
        MAGIC, VERSION, path.n_steps, path.dt, path.alpha, path.gamma, int(path.seed) & ((1 << 64) - 1)
    )
    with open(Path(dest), "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(path.states, dtype="<f8").tobytes())


def load_path(src) -> SamplePath:
    raw = Path(src).read_bytes()
    magic, version, n_steps, dt, alpha, gamma, seed = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"not a path dump (magic {magic!r})")
    if version != VERSION:
        raise ValueError(f"unsupported dump version {version}")
    states = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).astype(float)
    if len(states) != n_steps + 1:
        raise ValueError("truncated path dump")
    return SamplePath(dt, states, alpha, gamma, seed)
