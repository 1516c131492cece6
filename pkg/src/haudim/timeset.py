"""Random time sets from sampled paths and their box-counting dimension.

A time box [k delta, (k+1) delta) counts as hit when some sample time in it
puts the path within eps(delta) = phi^{-1}(delta) of the target, so the
spatial tolerance follows the space-time scaling of the process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .paths import ProductPath, SamplePath
from .scaling import DomainError, PowerScale, invert_scale


class SubResolutionError(ValueError):
    pass


class InsufficientScalesError(ValueError):
    def __init__(self, message: str, scales=(), counts=()):
        super().__init__(message)
        self.scales = list(scales)
        self.counts = list(counts)


# ---------------------------------------------------------------------------
# targets


class TargetSet:
    nominal_dim: float

    def distance(self, x) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Point(TargetSet):
    a: float = 0.0

    @property
    def nominal_dim(self) -> float:
        return 0.0

    def distance(self, x):
        return np.abs(np.asarray(x, float) - self.a)


@dataclass(frozen=True)
class IntervalUnion(TargetSet):
    """Finite union of disjoint closed intervals, given as (lo, hi) pairs."""

    intervals: tuple

    def __post_init__(self):
        iv = sorted((float(a), float(b)) for a, b in self.intervals)
        if not iv:
            raise DomainError("interval union needs at least one interval")
        for a, b in iv:
            if b < a:
                raise DomainError(f"bad interval ({a}, {b})")
        for (_, b0), (a1, _) in zip(iv, iv[1:]):
            if a1 <= b0:
                raise DomainError("intervals must be disjoint")
        object.__setattr__(self, "intervals", tuple(iv))

    @property
    def nominal_dim(self) -> float:
        return 1.0 if any(b > a for a, b in self.intervals) else 0.0

    @property
    def lows(self) -> np.ndarray:
        return np.array([a for a, _ in self.intervals])

    @property
    def highs(self) -> np.ndarray:
        return np.array([b for _, b in self.intervals])

    def distance(self, x):
        return _union_distance(np.asarray(x, float), self.lows, self.highs)


def _union_distance(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # index of the last interval starting at or left of x
    j = np.searchsorted(lo, x, side="right") - 1
    left = np.clip(j, 0, len(lo) - 1)
    right = np.clip(j + 1, 0, len(lo) - 1)
    d_left = np.where(j >= 0, np.maximum(x - hi[left], 0.0), np.inf)
    # x is left of interval ``right`` (or inside interval ``left``)
    d_right = np.where(j + 1 < len(lo), np.maximum(lo[right] - x, 0.0), np.inf)
    inside = (j >= 0) & (x <= hi[left])
    return np.where(inside, 0.0, np.minimum(d_left, d_right))


@dataclass(frozen=True)
class Cantor(TargetSet):
    """Level-L middle-(1-2r) Cantor construction over ``base``: 2^L intervals of length r^L."""

    ratio: float = 1.0 / 3.0
    level: int = 12
    base: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not (0 < self.ratio < 0.5):
            raise DomainError("Cantor ratio must lie in (0, 1/2)")
        if self.level < 0:
            raise DomainError("level must be nonnegative")

    @property
    def nominal_dim(self) -> float:
        return math.log(2.0) / math.log(1.0 / self.ratio)

    @cached_property
    def _lows(self) -> np.ndarray:
        a, b = self.base
        lows = np.array([0.0])
        for k in range(self.level):
            # children of a piece of length r^k start at offsets 0 and (1 - r) r^k
            lows = np.sort(np.concatenate([lows, lows + (1.0 - self.ratio) * self.ratio**k]))
        return a + (b - a) * lows

    def interval_lows(self) -> np.ndarray:
        return self._lows.copy()

    @property
    def piece_length(self) -> float:
        return (self.base[1] - self.base[0]) * self.ratio**self.level

    def distance(self, x):
        lo = self._lows
        return _union_distance(np.asarray(x, float), lo, lo + self.piece_length)


# ---------------------------------------------------------------------------
# hits


@dataclass
class TimeSetHits:
    T: float
    dt: float
    boxes: dict = field(default_factory=dict)  # delta -> sorted unique box indices

    @property
    def scales(self) -> list:
        return sorted(self.boxes)

    def count(self, delta: float) -> int:
        return int(len(self.boxes[delta]))

    def counts(self) -> list:
        return [self.count(d) for d in self.scales]

    def merge(self, other: "TimeSetHits") -> "TimeSetHits":
        out = TimeSetHits(self.T, self.dt, dict(self.boxes))
        for d, b in other.boxes.items():
            out.boxes[d] = np.union1d(out.boxes[d], b) if d in out.boxes else b
        return out

    def csv(self) -> str:
        return "delta,count\n" + "".join(f"{d:.17g},{self.count(d)}\n" for d in self.scales)


def dyadic_ladder(dt: float, T: float, ratio: float = 2.0) -> list:
    out, d = [], dt
    while d <= T * (1 + 1e-12):
        out.append(d)
        d *= ratio
    return out


def _boxes_from_mask(mask: np.ndarray, dt: float, delta: float, n_boxes: int) -> np.ndarray:
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return idx
    m = delta / dt
    mi = round(m)
    if mi >= 1 and abs(mi - m) <= 1e-9 * m:
        box = idx // mi
    else:
        box = np.floor(idx * (dt / delta)).astype(np.int64)
    box = np.minimum(box, n_boxes - 1)
    # indices are sorted so duplicates are adjacent
    keep = np.empty(box.size, bool)
    keep[0] = True
    np.not_equal(box[1:], box[:-1], out=keep[1:])
    return box[keep]


def _n_boxes(T: float, delta: float) -> int:
    return max(1, math.ceil(T / delta - 1e-9))


def _hits_from_distance(dist: np.ndarray, dt: float, T: float, scale: PowerScale, ladder: Sequence[float]) -> TimeSetHits:
    hits = TimeSetHits(T, dt)
    for delta in ladder:
        if delta < dt * (1 - 1e-12):
            raise SubResolutionError(f"scale {delta} is below the path resolution {dt}")
        eps = invert_scale(scale, delta)
        hits.boxes[float(delta)] = _boxes_from_mask(dist <= eps, dt, delta, _n_boxes(T, delta))
    return hits


def extract_hits(path: SamplePath, target: TargetSet, scale: PowerScale, delta_ladder: Sequence[float]) -> TimeSetHits:
    return _hits_from_distance(target.distance(path.states), path.dt, path.T, scale, delta_ladder)


def collision_hits(pp: ProductPath, scale: PowerScale, delta_ladder: Sequence[float], within: TargetSet | None = None) -> TimeSetHits:
    """Boxes where the components come within eps of each other (and of ``within``)."""
    x1, x2 = pp.first.states, pp.second.states
    gap = np.abs(x1 - x2)
    if within is not None:
        # both conditions must hold at the same sample time
        gap = np.maximum(gap, within.distance(x1))
    return _hits_from_distance(gap, pp.dt, pp.first.T, scale, delta_ladder)


# ---------------------------------------------------------------------------
# estimation

MIN_COUNT = 10
MIN_SCALES = 4


@dataclass
class DimensionEstimate:
    slope: float
    stderr: float
    scales_used: list
    counts: list
    empty: bool = False
    window: tuple = (0.0, 0.0)

    @property
    def dimension(self) -> float | None:
        if self.empty:
            return None
        return min(max(self.slope, 0.0), 1.0)

    def row(self, trial: int) -> str:
        if self.empty:
            return f"{trial},nan,nan"
        return f"{trial},{self.slope:.17g},{self.stderr:.17g}"


def default_window(dt: float, T: float) -> tuple:
    return (16.0 * dt, T / 64.0)


def fit_slope(scales, counts) -> tuple[float, float]:
    """Least-squares slope of log N against log(1/delta), with its standard error."""
    x = -np.log(np.asarray(scales, float))
    y = np.log(np.asarray(counts, float))
    n = len(x)
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ (y - y.mean())) / sxx
    if n > 2:
        resid = y - y.mean() - slope * xm
        stderr = math.sqrt(float(resid @ resid) / (n - 2) / sxx)
    else:
        stderr = float("nan")
    return slope, stderr


def estimate_dimension(hits: TimeSetHits, scale_window: tuple | None = None) -> DimensionEstimate:
    """Box-counting slope over the ladder scales inside ``scale_window``.

    Scales whose count falls below MIN_COUNT are dropped; if fewer than
    MIN_SCALES remain the time set is reported Empty at this resolution.
    """
    lo, hi = scale_window if scale_window is not None else default_window(hits.dt, hits.T)
    inside = [d for d in hits.scales if lo * (1 - 1e-9) <= d <= hi * (1 + 1e-9)]
    counts = [hits.count(d) for d in inside]
    if len(inside) < MIN_SCALES:
        raise InsufficientScalesError(
            f"only {len(inside)} ladder scales inside window [{lo:g}, {hi:g}]", inside, counts
        )
    usable = [(d, c) for d, c in zip(inside, counts) if c >= MIN_COUNT]
    if len(usable) < MIN_SCALES:
        return DimensionEstimate(float("nan"), float("nan"), inside, counts, empty=True, window=(lo, hi))
    ds, cs = zip(*usable)
    slope, se = fit_slope(ds, cs)
    return DimensionEstimate(slope, se, list(ds), list(cs), window=(lo, hi))
