"""Scale functions, gamma curves and closed-form dimension predictions.

Everything here is pure and deterministic.  The concrete families are
piecewise power laws with a break at r = 1:

    phi(r) = r**alpha_local  (r <= 1),   r**alpha_global  (r >= 1)
    V(r)   = r**d_local      (r <= 1),   r**d_global      (r >= 1)

The numeric gamma path (:func:`gamma_numeric`) only needs a callable
``t -> phi^{-1}(t)**s / V(phi^{-1}(t))`` on (0, 1] and therefore works for
any monotone profile.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np


class DomainError(ValueError):
    """Argument outside the domain of a scale or volume function."""


class IndeterminateError(RuntimeError):
    """Shell test could not classify an integral within the allowed depth."""

    def __init__(self, message: str, partial: dict | None = None):
        super().__init__(message)
        self.partial = partial or {}


class MissingBoundError(ValueError):
    """A heat kernel bound needed by a prediction was not declared."""

    def __init__(self, flag: "Bound"):
        super().__init__(f"process class does not declare the {flag.value} bound")
        self.flag = flag


class ProfileMismatchError(ValueError):
    pass


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class PowerScale:
    """Piecewise power scaling function with phi(0)=0 and phi(1)=1."""

    alpha_local: float
    alpha_global: float

    def __post_init__(self):
        _check_positive("alpha_local", self.alpha_local)
        _check_positive("alpha_global", self.alpha_global)

    @classmethod
    def pure(cls, alpha: float) -> "PowerScale":
        return cls(alpha, alpha)

    @property
    def alpha_min(self) -> float:
        return min(self.alpha_local, self.alpha_global)

    @property
    def alpha_max(self) -> float:
        return max(self.alpha_local, self.alpha_global)

    def __call__(self, r):
        return eval_scale(self, r)

    def inverse(self, t):
        return invert_scale(self, t)

    def power(self, gamma: float) -> "PowerScale":
        """The subordinated scale phi**gamma."""
        return PowerScale(self.alpha_local * gamma, self.alpha_global * gamma)


def _piecewise_power(x, e_local: float, e_global: float, what: str):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{what} requires a nonnegative argument")
    out = np.where(arr <= 1.0, arr ** e_local, arr ** e_global)
    return float(out) if out.ndim == 0 else out


def eval_scale(scale: PowerScale, r):
    return _piecewise_power(r, scale.alpha_local, scale.alpha_global, "eval_scale")


def invert_scale(scale: PowerScale, t):
    # phi(1) = 1 so both branches split at the same point in t.
    return _piecewise_power(t, 1.0 / scale.alpha_local, 1.0 / scale.alpha_global, "invert_scale")


@dataclass(frozen=True)
class VolumeProfile:
    """Piecewise power volume function V(r) with V(0)=0."""

    d_local: float
    d_global: float

    def __post_init__(self):
        _check_positive("d_local", self.d_local)
        _check_positive("d_global", self.d_global)

    @classmethod
    def pure(cls, d: float) -> "VolumeProfile":
        return cls(d, d)

    def __call__(self, r):
        return _piecewise_power(r, self.d_local, self.d_global, "volume")


class ProcessKind(str, enum.Enum):
    DIFFUSION = "diffusion"
    STABLE_JUMP = "stable_jump"
    DIFFUSION_WITH_JUMPS = "diffusion_with_jumps"


class Bound(str, enum.Enum):
    ODHK = "ODHK"
    NDLHK = "NDLHK"
    WUHK = "WUHK"
    HR = "HR"


ALL_BOUNDS = frozenset(Bound)


@dataclass(frozen=True)
class ProcessClass:
    volume: VolumeProfile
    scale: PowerScale
    kind: ProcessKind = ProcessKind.STABLE_JUMP
    assumed_bounds: frozenset = ALL_BOUNDS

    def __post_init__(self):
        object.__setattr__(self, "kind", ProcessKind(self.kind))
        object.__setattr__(self, "assumed_bounds", frozenset(Bound(b) for b in self.assumed_bounds))
        if self.kind is ProcessKind.DIFFUSION and self.scale.alpha_local < 2:
            raise DomainError(
                f"a diffusion has walk dimension >= 2, got alpha_local={self.scale.alpha_local}"
            )

    @classmethod
    def from_exponents(
        cls,
        d_local: float,
        alpha_local: float,
        d_global: float | None = None,
        alpha_global: float | None = None,
        kind: str | ProcessKind = ProcessKind.STABLE_JUMP,
        bounds: Iterable = ALL_BOUNDS,
    ) -> "ProcessClass":
        return cls(
            VolumeProfile(d_local, d_local if d_global is None else d_global),
            PowerScale(alpha_local, alpha_local if alpha_global is None else alpha_global),
            ProcessKind(kind),
            frozenset(bounds),
        )

    @classmethod
    def brownian(cls, d: float = 1.0) -> "ProcessClass":
        return cls.from_exponents(d, 2.0, kind=ProcessKind.DIFFUSION)

    @classmethod
    def stable(cls, alpha: float, d: float = 1.0) -> "ProcessClass":
        return cls.from_exponents(d, alpha)

    def require(self, *flags: Bound) -> None:
        for flag in flags:
            if flag not in self.assumed_bounds:
                raise MissingBoundError(flag)

    def as_dict(self) -> dict:
        return {
            "d_local": self.volume.d_local,
            "d_global": self.volume.d_global,
            "alpha_local": self.scale.alpha_local,
            "alpha_global": self.scale.alpha_global,
            "kind": self.kind.value,
        }


class Variant(str, enum.Enum):
    SINGLE = "single"
    COLLISION = "collision"


@dataclass(frozen=True)
class GammaCurve:
    """gamma(s) = max(intercept - slope*s, 0); zero from s0 = intercept/slope on."""

    intercept: float
    slope: float
    variant: Variant = Variant.SINGLE

    @property
    def s0(self) -> float:
        return self.intercept / self.slope

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0):
            raise DomainError("gamma(s) is defined for s >= 0")
        out = np.maximum(self.intercept - self.slope * s_arr, 0.0)
        return float(out) if out.ndim == 0 else out


def gamma_curve(proc: ProcessClass) -> GammaCurve:
    a = proc.scale.alpha_local
    return GammaCurve(proc.volume.d_local / a, 1.0 / a, Variant.SINGLE)


def gamma_closed_form(proc: ProcessClass, s: float) -> float:
    if s < 0:
        raise DomainError("s must be nonnegative")
    return max((proc.volume.d_local - s) / proc.scale.alpha_local, 0.0)


# ---------------------------------------------------------------------------
# numeric gamma via dyadic shell test

SHELL_RATIO_THRESHOLD = 0.95
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)
# nodes mapped to u in [1/2, 1]
_U = 0.75 + 0.25 * _GL_NODES
_W = 0.25 * _GL_WEIGHTS


@dataclass
class ShellTest:
    """Outcome of one divergence classification."""

    gamma: float
    divergent: bool
    mean_ratio: float
    ratios: np.ndarray
    depth: int


def _log_shell_masses(log_g: Callable[[np.ndarray], np.ndarray], gamma: float, ks: np.ndarray) -> np.ndarray:
    """log of int_{2^{-k-1}}^{2^{-k}} g(t) t^(gamma-1) dt for each k (log-space, no underflow)."""
    out = np.empty(len(ks))
    ln2 = math.log(2.0)
    for i, k in enumerate(ks):
        t = _U * 2.0 ** (-float(k))
        lg = log_g(t)
        ref = lg.max()
        # t^(gamma-1) dt = 2^{-k gamma} u^(gamma-1) du
        integrand = np.exp(lg - ref) * _U ** (gamma - 1.0)
        out[i] = ref - k * gamma * ln2 + math.log(float(np.dot(_W, integrand)))
    return out


def classify_shells(
    log_g: Callable[[np.ndarray], np.ndarray],
    gamma: float,
    shells: int = 8,
    depth: int = 48,
    max_depth: int = 768,
    threshold: float = SHELL_RATIO_THRESHOLD,
) -> ShellTest:
    """Classify int_0^1 g(t) t^(gamma-1) dt as convergent or divergent.

    The last ``shells`` dyadic shell contributions ending at ``depth`` are
    compared.  A mean successive ratio >= 1 means no geometric decay
    (divergent; equality is the logarithmic boundary).  Ratios inside
    [threshold, 1) are ambiguous and the window is pushed deeper; if the
    ratio keeps drifting upward the integrand is slower than any power and
    we call it divergent.  Scattered ratios at max depth are indeterminate.
    """
    prev_mean = None
    d = depth
    while True:
        ks = np.arange(d - shells, d + 1)
        logs = _log_shell_masses(log_g, gamma, ks)
        log_ratios = np.diff(logs)
        ratios = np.exp(log_ratios)
        mean_log = float(np.mean(log_ratios))
        mean_ratio = math.exp(mean_log)
        spread = float(np.ptp(log_ratios))
        steady = spread <= 1e-6 * max(1.0, abs(mean_log))
        if mean_ratio < threshold and np.all(ratios < 1.0):
            return ShellTest(gamma, False, mean_ratio, ratios, d)
        if mean_log >= -1e-12 and (steady or np.all(log_ratios >= -1e-12)):
            return ShellTest(gamma, True, mean_ratio, ratios, d)
        if steady:
            # exact power tail in the ambiguous band: the sign of the rate decides
            return ShellTest(gamma, mean_log >= -1e-12, mean_ratio, ratios, d)
        if prev_mean is not None and mean_ratio > prev_mean and d * 2 > max_depth:
            return ShellTest(gamma, True, mean_ratio, ratios, d)
        if d * 2 > max_depth:
            raise IndeterminateError(
                f"shell ratios did not settle by depth {d} (gamma={gamma})",
                {"gamma": gamma, "depth": d, "ratios": ratios.tolist()},
            )
        prev_mean = mean_ratio
        d *= 2


def _power_log_g(volume: VolumeProfile, scale: PowerScale, s: float):
    def log_g(t):
        r = invert_scale(scale, t)
        return s * np.log(r) - np.log(volume(r))

    return log_g


def gamma_numeric(
    volume: VolumeProfile,
    scale: PowerScale,
    s: float,
    tol: float = 1e-6,
    shells: int = 8,
    log_g: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """Infimum of gamma > 0 making int_0^1 phi^-1(t)^s / V(phi^-1(t)) t^(gamma-1) dt finite.

    Bisection on gamma with :func:`classify_shells` as the oracle.  ``log_g``
    overrides the integrand for non-power profiles.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if s < 0:
        raise DomainError("s must be nonnegative")
    if log_g is None:
        log_g = _power_log_g(volume, scale, s)

    def diverges(g: float) -> bool:
        return classify_shells(log_g, g, shells=shells).divergent

    # gamma(s) = 0 when the integral already converges for arbitrarily small gamma
    tiny = tol / 4
    if not diverges(tiny):
        return 0.0
    lo, hi = tiny, 1.0
    while diverges(hi):
        lo, hi = hi, hi * 2
        if hi > 2.0**20:
            raise IndeterminateError("no convergent gamma found below 2^20", {"s": s})
    while hi - lo > tol / 2:
        mid = 0.5 * (lo + hi)
        if diverges(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# collision curve and integral tests


def _shared_volume(p1: ProcessClass, p2: ProcessClass) -> VolumeProfile:
    if p1.volume != p2.volume:
        raise ProfileMismatchError(
            f"processes live on different spaces: {p1.volume} vs {p2.volume}"
        )
    return p1.volume


def collision_curve(p1: ProcessClass, p2: ProcessClass) -> GammaCurve:
    vol = _shared_volume(p1, p2)
    a_small, a_large = sorted((p1.scale.alpha_local, p2.scale.alpha_local))
    d1 = vol.d_local
    return GammaCurve(d1 / a_small + d1 / a_large, 1.0 / a_small, Variant.COLLISION)


def collision_gamma(p1: ProcessClass, p2: ProcessClass, s: float) -> float:
    vol = _shared_volume(p1, p2)
    a_small, a_large = sorted((p1.scale.alpha_local, p2.scale.alpha_local))
    d1 = vol.d_local
    return max((d1 - s) / a_small + d1 / a_large, 0.0)


def collision_s0(p1: ProcessClass, p2: ProcessClass) -> float:
    vol = _shared_volume(p1, p2)
    a_small, a_large = sorted((p1.scale.alpha_local, p2.scale.alpha_local))
    d1 = vol.d_local
    return a_small * (d1 / a_small + d1 / a_large)


class Integral(str, enum.Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"


def _check_gamma(gamma: float) -> None:
    if not (0 < gamma <= 1):
        raise DomainError(f"subordination index must lie in (0, 1], got {gamma}")


def recurrence_I(proc: ProcessClass, gamma: float) -> Integral:
    """int_1^inf dt / V((phi^gamma)^{-1}(t)) ~ int t^{-d2/(gamma alpha2)} dt."""
    _check_gamma(gamma)
    rate = proc.volume.d_global / (gamma * proc.scale.alpha_global)
    return Integral.INFINITE if rate <= 1 else Integral.FINITE


def product_J(p1: ProcessClass, p2: ProcessClass, gamma: float) -> Integral:
    _check_gamma(gamma)
    vol = _shared_volume(p1, p2)
    rate = vol.d_global / p1.scale.alpha_global + vol.d_global / p2.scale.alpha_global
    return Integral.INFINITE if rate <= gamma else Integral.FINITE


def point_capacity_positive(proc: ProcessClass) -> bool:
    """Cap({a}) > 0 iff int_0^1 dt / V(phi^{-1}(t)) < inf, i.e. d1 < alpha_local."""
    proc.require(Bound.ODHK)
    return proc.volume.d_local < proc.scale.alpha_local


# ---------------------------------------------------------------------------
# predictions


class Regime(str, enum.Enum):
    LEVEL = "level"
    INVERSE_IMAGE = "inverse_image"
    COLLISION = "collision"


@dataclass(frozen=True)
class Condition:
    name: str
    holds: bool
    detail: str = ""

    def __str__(self):
        mark = "ok" if self.holds else "FAILS"
        return f"{self.name}: {mark}" + (f" ({self.detail})" if self.detail else "")


def _cmp(name: str, lhs: float, op: str, rhs: float) -> Condition:
    eps = 1e-12
    holds = {
        "<": lhs < rhs - eps,
        "<=": lhs <= rhs + eps,
        ">": lhs > rhs + eps,
        ">=": lhs >= rhs - eps,
    }[op]
    return Condition(name, bool(holds), f"{lhs:.6g} {op} {rhs:.6g}")


@dataclass(frozen=True)
class DimPrediction:
    """Predicted Hausdorff dimension of a random time set.

    ``value`` is None for the Empty verdict.
    """

    value: float | None
    regime: Regime
    gamma: float
    conditions_met: tuple = field(default_factory=tuple)

    @property
    def empty(self) -> bool:
        return self.value is None

    @property
    def certified(self) -> bool:
        return all(c.holds for c in self.conditions_met)

    @property
    def boundary(self) -> bool:
        return abs(self.gamma - 1.0) < 1e-12

    def describe(self) -> str:
        head = "Empty" if self.empty else f"{self.value:.6g}"
        tag = "certified" if self.certified else "not certified"
        lines = [f"predicted {head} [{self.regime.value}, gamma={self.gamma:.6g}, {tag}]"]
        lines += [f"  {c}" for c in self.conditions_met]
        return "\n".join(lines)


def _value_from_gamma(g: float) -> float | None:
    return None if g > 1 + 1e-12 else 1.0 - min(g, 1.0)


def predict_level_dim(proc: ProcessClass, at: str = "a") -> DimPrediction:
    """dim {s > 0 : X_s = at}."""
    proc.require(Bound.ODHK)
    g0 = gamma_closed_form(proc, 0.0)
    conds = [
        _cmp("gamma(0) > 0", g0, ">", 0.0),
        _cmp("gamma(0) <= 1", g0, "<=", 1.0),
        Condition(
            "I^1 infinite (recurrence)",
            recurrence_I(proc, 1.0) is Integral.INFINITE,
            f"d2/alpha_global = {proc.volume.d_global / proc.scale.alpha_global:.6g} <= 1",
        ),
        Condition("NDLHK declared", Bound.NDLHK in proc.assumed_bounds),
    ]
    if abs(g0 - 1.0) < 1e-12:
        conds.append(Condition("boundary gamma(0) = 1", True, "dimension 0 at the boundary"))
    return DimPrediction(_value_from_gamma(g0), Regime.LEVEL, g0, tuple(conds))


def predict_inverse_dim(proc: ProcessClass, s_F: float) -> DimPrediction:
    """dim {t > 0 : X_t in F} for a Borel F with dim F = s_F."""
    d1 = proc.volume.d_local
    if not s_F > 0:
        raise DomainError("s_F must be positive")
    if s_F > d1 + 1e-12:
        raise DomainError(f"target dimension {s_F} exceeds ambient dimension {d1}")
    alpha = proc.scale.alpha_local
    g = gamma_closed_form(proc, s_F)
    conds = [
        _cmp("d1 - alpha <= s_F", d1 - alpha, "<=", s_F),
        _cmp("s_F <= d1", s_F, "<=", d1),
        _cmp("d2 <= alpha_global", proc.volume.d_global, "<=", proc.scale.alpha_global),
    ]
    if abs(g - 1.0) < 1e-12:
        conds.append(Condition("boundary gamma(s_F) = 1", True))
    return DimPrediction(_value_from_gamma(g), Regime.INVERSE_IMAGE, g, tuple(conds))


def collision_conditions(p1: ProcessClass, p2: ProcessClass, s_F: float, t_F: float) -> dict:
    """Both inequality sets of the power-law collision example, keyed by branch."""
    vol = _shared_volume(p1, p2)
    a11, a21 = sorted((p1.scale.alpha_local, p2.scale.alpha_local))
    a12, a22 = sorted((p1.scale.alpha_global, p2.scale.alpha_global))
    d1, d2 = vol.d_local, vol.d_global
    s0 = a11 * (d1 / a11 + d1 / a21)
    common = [
        _cmp("d1 < (2 alpha11) ^ alpha21", d1, "<", min(2 * a11, a21)),
        _cmp("s-f lower: s0 - alpha11 < s_F", s0 - a11, "<", s_F),
        _cmp("s-f upper: s_F <= d1 ^ alpha11(1 + d1/alpha21)", s_F, "<=", min(d1, a11 * (1 + d1 / a21))),
    ]
    rate = d2 / a12 + d2 / a22
    recurrent = common + [_cmp("t-f-1: d2/alpha12 + d2/alpha22 <= 1", rate, "<=", 1.0)]
    transient = common + [
        _cmp("s_F < s0", s_F, "<", s0),
        _cmp("d2 < alpha12", d2, "<", a12),
        _cmp("t-f-0: d1/alpha11 + d1/alpha21 > 1", d1 / a11 + d1 / a21, ">", 1.0),
        _cmp("t-f-a: d2/alpha12 + d2/alpha22 > 1", rate, ">", 1.0),
        _cmp("t-f-b lower: alpha22(d2/alpha12 + d2/alpha22 - 1) < t_F", a22 * (rate - 1.0), "<", t_F),
        _cmp("t-f-b upper: t_F <= d2", t_F, "<=", d2),
    ]
    return {"recurrent": recurrent, "transient": transient}


def predict_collision_dim(p1: ProcessClass, p2: ProcessClass, s_F: float, t_F: float) -> DimPrediction:
    """dim {s > 0 : X1_s = X2_s in F}; unmet conditions leave the value uncertified."""
    g = collision_gamma(p1, p2, s_F)
    branches = collision_conditions(p1, p2, s_F, t_F)
    rec_ok = all(c.holds for c in branches["recurrent"])
    tr_ok = all(c.holds for c in branches["transient"])
    if rec_ok:
        chosen = [Condition("branch", True, "recurrent (J^1 = inf)")] + branches["recurrent"]
    elif tr_ok:
        chosen = [Condition("branch", True, "transient (J^1 < inf)")] + branches["transient"]
    else:
        # report the branch selected by J^1 so the failing inequality is visible
        key = "recurrent" if product_J(p1, p2, 1.0) is Integral.INFINITE else "transient"
        chosen = [Condition("branch", False, f"{key} branch conditions incomplete")] + branches[key]
    if abs(g - 1.0) < 1e-12:
        chosen.append(Condition("boundary gamma(s_F) = 1", True))
    return DimPrediction(_value_from_gamma(g), Regime.COLLISION, g, tuple(chosen))
