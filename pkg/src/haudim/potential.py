"""Energy integrals, Frostman brackets, annulus families and Wiener-test experiments.

Energies are off-diagonal Riesz sums sum_{i != j} m_i m_j |x_i - x_j|^{-s} over
atomic measures.  An atomic measure always has infinite energy if the
diagonal is kept, so what carries information is the sequence of sums over
refinement levels: it settles when s is below the dimension of the limit set
and keeps growing when s is above it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .paths import PathSpec, ProductPath, product_path
from .scaling import DomainError, Integral, PowerScale, ProcessClass, product_J
from .seeds import seed_derivation
from .timeset import IntervalUnion, TargetSet

# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many atoms on the line (shape (n,)) or in the plane (shape (n, 2))."""

    points: np.ndarray
    masses: np.ndarray
    refinement_level: int = 0
    refine: Callable[[int], "DiscreteMeasure"] | None = field(default=None, compare=False, repr=False)
    spectrum: Callable[[], tuple] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, float)
        m = np.asarray(self.masses, float)
        if len(pts) != len(m):
            raise DomainError("points and masses differ in length")
        if len(m) == 0:
            raise DomainError("measure needs at least one atom")
        if np.any(m <= 0):
            raise DomainError("masses must be positive")
        flat = pts.reshape(len(pts), -1)
        if len(np.unique(flat, axis=0)) != len(flat):
            raise DomainError("atoms must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return len(self.masses)

    def ball_mass(self, center, radius: float) -> float:
        pts = self.points.reshape(len(self), -1)
        d = np.linalg.norm(pts - np.asarray(center, float).reshape(1, -1), axis=1)
        return float(self.masses[d <= radius].sum())


def cantor_measure(ratio: float = 1.0 / 3.0, level: int = 8) -> DiscreteMeasure:
    """2^L atoms of mass 2^-L at the midpoints of the level-L Cantor intervals in [0, 1]."""
    if not (0 < ratio < 0.5):
        raise DomainError("ratio must lie in (0, 1/2)")
    if level < 1:
        raise DomainError("level must be at least 1")
    lows = np.array([0.0])
    for k in range(level):
        lows = np.sort(np.concatenate([lows, lows + (1.0 - ratio) * ratio**k]))
    mids = lows + 0.5 * ratio**level
    n = 2**level
    return DiscreteMeasure(
        mids,
        np.full(n, 1.0 / n),
        level,
        refine=lambda L: cantor_measure(ratio, L),
        spectrum=lambda: _cantor_spectrum(ratio, level),
    )


def _cantor_spectrum(ratio: float, level: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Positive pair separations with ordered-pair counts, and the common atom mass.

    Two atoms differ by sum_k (1 - r) r^k e_k with digit differences e_k in
    {-1, 0, 1}; each pattern is realised by prod_k (2 if e_k = 0 else 1)
    ordered pairs.  Only the positive half is kept (with doubled counts).
    """
    v = np.array([0.0])
    c = np.array([1.0])
    for k in range(level):
        step = (1.0 - ratio) * ratio**k
        v = np.concatenate([v - step, v, v + step])
        c = np.concatenate([c, 2.0 * c, c])
    pos = v > 0
    return v[pos], 2.0 * c[pos], 2.0**-level


def _brute_spectrum(nu: DiscreteMeasure, chunk: int = 2048):
    pts = nu.points.reshape(len(nu), -1)
    for i in range(0, len(nu), chunk):
        d = np.linalg.norm(pts[i : i + chunk, None, :] - pts[None, :, :], axis=2)
        w = nu.masses[i : i + chunk, None] * nu.masses[None, :]
        off = d > 0
        yield d[off], w[off]


def pair_energy(nu: DiscreteMeasure, s) -> np.ndarray:
    """sum_{i != j} m_i m_j |x_i - x_j|^{-s}, vectorised over an array of exponents."""
    s_arr = np.atleast_1d(np.asarray(s, float))
    if np.any(s_arr <= 0):
        raise DomainError("energy exponent s must be positive")
    out = np.zeros(len(s_arr))
    if nu.spectrum is not None:
        dist, counts, mass = nu.spectrum()
        logd = np.log(dist)
        for i, si in enumerate(s_arr):
            out[i] = mass * mass * float(counts @ np.exp(-si * logd))
        return out
    for dist, w in _brute_spectrum(nu):
        logd = np.log(dist)
        for i, si in enumerate(s_arr):
            out[i] += float(w @ np.exp(-si * logd))
    return out


@dataclass
class EnergySequence:
    s: float
    levels: list
    values: np.ndarray

    @property
    def differences(self) -> np.ndarray:
        return np.diff(self.values)


def energy_integral(nu: DiscreteMeasure, s: float, levels: Sequence[int] | None = None) -> EnergySequence:
    """Off-diagonal energy of ``nu`` and its refinements, one value per level."""
    if s <= 0:
        raise DomainError("energy exponent s must be positive")
    if levels is None:
        L = nu.refinement_level
        levels = list(range(max(1, L - 8), L + 1)) if nu.refine is not None else [L]
    levels = list(levels)
    vals = []
    for L in levels:
        m = nu if (nu.refine is None or L == nu.refinement_level) else nu.refine(L)
        vals.append(0.0 if len(m) < 2 else float(pair_energy(m, s)[0]))
    return EnergySequence(float(s), levels, np.array(vals))


def energy_table(family: Callable[[int], DiscreteMeasure], s_grid, levels: Sequence[int]) -> np.ndarray:
    """Energies for every (level, s) pair: rows are levels, columns exponents."""
    s_grid = np.asarray(s_grid, float)
    return np.array([pair_energy(family(L), s_grid) for L in levels])


class Verdict(enum.Enum):
    FINITE = "FiniteEnergy"
    DIVERGENT = "DivergentEnergy"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:
        return self.value


FINITE_RATIO = 0.9
DIVERGENT_RATIO = 1.0
TAIL = 3


def frostman_verdict(
    seq, finite_ratio: float = FINITE_RATIO, divergent_ratio: float = DIVERGENT_RATIO, tail: int = TAIL
) -> Verdict:
    """Cauchy-trend test on an energy sequence.

    FiniteEnergy when each of the last ``tail`` ratios of successive level
    differences is at most ``finite_ratio`` (geometric shrinkage);
    DivergentEnergy when each is at least ``divergent_ratio`` (the increments
    do not shrink, so the series diverges); Indeterminate otherwise, and for
    degenerate sequences (a single atom gives an all-zero sequence).
    """
    values = np.asarray(getattr(seq, "values", seq), float)
    if len(values) < 5:
        raise ValueError("frostman_verdict needs at least 5 levels")
    if not np.any(values > 0):
        return Verdict.INDETERMINATE
    d = np.abs(np.diff(values))
    if np.any(d[-tail - 1 :] == 0):
        return Verdict.INDETERMINATE
    ratios = d[1:] / d[:-1]
    last = ratios[-tail:]
    if np.all(last <= finite_ratio):
        return Verdict.FINITE
    if np.all(last >= divergent_ratio):
        return Verdict.DIVERGENT
    return Verdict.INDETERMINATE


@dataclass
class FrostmanBracket:
    s_grid: np.ndarray
    verdicts: list
    last_finite: float
    first_divergent: float

    @property
    def flip(self) -> float:
        """Exponent at which the verdict turns DivergentEnergy for good."""
        return self.first_divergent

    def csv(self) -> str:
        return "s,verdict\n" + "".join(f"{s:.4f},{v}\n" for s, v in zip(self.s_grid, self.verdicts))


def frostman_bracket(
    ratio: float = 1.0 / 3.0, s_grid=None, levels: Sequence[int] = range(6, 15), **kw
) -> FrostmanBracket:
    s_grid = np.round(np.arange(0.30, 0.95 + 1e-9, 0.01), 2) if s_grid is None else np.asarray(s_grid, float)
    table = energy_table(lambda L: cantor_measure(ratio, L), s_grid, levels)
    verdicts = [frostman_verdict(table[:, j], **kw) for j in range(len(s_grid))]
    finite = [s for s, v in zip(s_grid, verdicts) if v is Verdict.FINITE]
    # smallest s from which every larger grid exponent is divergent
    first_div = math.nan
    for j in range(len(s_grid) - 1, -1, -1):
        if verdicts[j] is not Verdict.DIVERGENT:
            break
        first_div = float(s_grid[j])
    return FrostmanBracket(s_grid, verdicts, float(max(finite)) if finite else math.nan, first_div)


# ---------------------------------------------------------------------------
# annuli


class SeparationError(DomainError):
    def __init__(self, message: str, minimum: float):
        super().__init__(message)
        self.minimum = minimum


def required_lambda(scales: Sequence[PowerScale], outward: bool = True) -> float:
    """Smallest lambda > 1 (or largest lambda < 1) with phi^-1(lambda t) >= 2 phi^-1(t) for all t."""
    a_max = max(sc.alpha_max for sc in scales)
    return 2.0**a_max if outward else 2.0**-a_max


@dataclass(frozen=True)
class AnnulusFamily:
    """B_n = {y : lam^n <= phi_d(x, y) <= lam^(n+1)} (outward) or the mirrored inward shells."""

    center: tuple
    lam: float
    scales: tuple
    n_range: tuple
    base: TargetSet | None = None

    @property
    def outward(self) -> bool:
        return self.lam > 1

    @property
    def indices(self) -> list:
        return list(range(self.n_range[0], self.n_range[1] + 1))

    def phi_d(self, y1, y2) -> np.ndarray:
        a = self.scales[0](np.abs(np.asarray(y1, float) - self.center[0]))
        b = self.scales[1](np.abs(np.asarray(y2, float) - self.center[1]))
        return np.maximum(a, b)

    def bounds(self, n: int) -> tuple[float, float]:
        lo, hi = self.lam**n, self.lam ** (n + 1)
        return (lo, hi) if self.outward else (hi, lo)

    def contains(self, n: int, y1, y2) -> np.ndarray:
        lo, hi = self.bounds(n)
        v = self.phi_d(y1, y2)
        return (v >= lo) & (v <= hi)

    def shell_index(self, y1, y2) -> np.ndarray:
        """floor(log_lam phi_d): the n with y in B_n (boundary points go to the outer shell)."""
        v = self.phi_d(y1, y2)
        with np.errstate(divide="ignore"):
            return np.floor(np.log(v) / math.log(self.lam) + 1e-12).astype(np.int64)


def build_annuli(center, lam: float, scales, base: TargetSet | None = None, n_range=(1, 8)) -> AnnulusFamily:
    if lam <= 0 or lam == 1:
        raise DomainError("lambda must be positive and different from 1")
    scales = tuple(scales)
    if len(scales) != 2:
        raise DomainError("need one scale per component")
    outward = lam > 1
    need = required_lambda(scales, outward)
    ok = lam >= need * (1 - 1e-12) if outward else lam <= need * (1 + 1e-12)
    if not ok:
        side = "at least" if outward else "at most"
        raise SeparationError(
            f"lambda = {lam} fails the separation requirement phi^-1(lambda t) >= 2 phi^-1(t); "
            f"need lambda {side} {need:.6g}",
            need,
        )
    if n_range[1] < n_range[0]:
        raise DomainError("empty annulus index range")
    return AnnulusFamily(tuple(float(c) for c in center), float(lam), scales, tuple(n_range), base)


# ---------------------------------------------------------------------------
# Monte Carlo hitting


@dataclass
class HitEstimate:
    hits: int
    trials: int
    ci_low: float
    ci_high: float

    @property
    def p_hat(self) -> float:
        return self.hits / self.trials


def wilson(hits: int, trials: int, confidence: float = 0.95) -> HitEstimate:
    ci = stats.binomtest(hits, trials).proportion_ci(confidence, method="wilson")
    return HitEstimate(int(hits), int(trials), float(ci.low), float(ci.high))


class HitTarget:
    """Tests whether a product path enters a set; subclasses decide which set."""

    def hit(self, pp: ProductPath) -> bool:
        raise NotImplementedError

    def shells(self, pp: ProductPath) -> set:
        """Indices of annuli entered (for targets attached to a family)."""
        raise NotImplementedError


class WholeSpace(HitTarget):
    def hit(self, pp):
        return True


@dataclass
class DiagonalTarget(HitTarget):
    """diag(F) for F = ``within`` (or the whole line), optionally restricted to one annulus and a time window.

    A sample time counts when |x1 - x2| <= eps and dist(x1, F) <= eps with
    eps = phi^-1(dt) for the given scale.
    """

    scale: PowerScale
    within: TargetSet | None = None
    annuli: AnnulusFamily | None = None
    n: int | None = None
    t_min: float = 0.0

    def _mask(self, pp: ProductPath) -> np.ndarray:
        x1, x2 = pp.first.states, pp.second.states
        eps = float(self.scale.inverse(pp.dt))
        gap = np.abs(x1 - x2)
        if self.within is not None:
            gap = np.maximum(gap, self.within.distance(x1))
        mask = gap <= eps
        if self.t_min > 0:
            mask &= pp.first.times >= self.t_min
        return mask

    def hit(self, pp):
        mask = self._mask(pp)
        if self.annuli is not None and self.n is not None:
            idx = np.flatnonzero(mask)
            if idx.size == 0:
                return False
            x1 = pp.first.states[idx]
            return bool(np.any(self.annuli.contains(self.n, x1, x1)))
        return bool(mask.any())

    def shells(self, pp):
        idx = np.flatnonzero(self._mask(pp))
        if idx.size == 0:
            return set()
        x1 = pp.first.states[idx]
        return set(np.unique(self.annuli.shell_index(x1, x1)).tolist())


def _pool_map(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def mc_hitting(
    pp_generator: Callable[[int], ProductPath],
    target: HitTarget,
    trials: int,
    seed: int,
    workers: int = 1,
) -> HitEstimate:
    """Fraction of independent product paths that enter ``target``, with a Wilson interval.

    Trial i uses seed_derivation(seed, i), so the estimate does not depend on
    ``workers``.
    """
    if trials < 100:
        raise ValueError("mc_hitting needs at least 100 trials")
    res = _pool_map(lambda i: target.hit(pp_generator(seed_derivation(seed, i))), range(trials), workers)
    return wilson(sum(res), trials)


# ---------------------------------------------------------------------------
# Wiener experiments


class WienerVerdict(enum.Enum):
    DIVERGES = "DivergesLikely"
    CONVERGES = "ConvergesLikely"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:
        return self.value


@dataclass
class WienerConfig:
    """One Wiener-test design.

    ``path_for(n, seed)`` returns the product path used for annulus n
    (``shared=False``) or for all annuli at once (``shared=True``, n is None).
    """

    family: AnnulusFamily
    target: DiagonalTarget
    path_for: Callable
    trials: int
    seed: int
    analytic: Integral
    shared: bool = False
    diverge_fraction: float = 0.5
    converge_fraction: float = 0.05
    label: str = ""


@dataclass
class WienerReport:
    n: list
    estimates: list
    verdict: WienerVerdict
    analytic: Integral
    thresholds: dict = field(default_factory=dict)
    label: str = ""

    @property
    def p_hat(self) -> np.ndarray:
        return np.array([e.p_hat for e in self.estimates])

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.p_hat)

    @property
    def agrees(self) -> bool:
        want = WienerVerdict.DIVERGES if self.analytic is Integral.INFINITE else WienerVerdict.CONVERGES
        return self.verdict is want

    def csv(self) -> str:
        lines = ["n,p_hat,ci_low,ci_high,partial_sum"]
        for n, e, ps in zip(self.n, self.estimates, self.partial_sums):
            lines.append(f"{n},{e.p_hat:.17g},{e.ci_low:.17g},{e.ci_high:.17g},{ps:.17g}")
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        out = [f"Wiener experiment {self.label}".rstrip()]
        for n, e, ps in zip(self.n, self.estimates, self.partial_sums):
            out.append(f"  n={n:2d}  p_hat={e.p_hat:.4f}  [{e.ci_low:.4f}, {e.ci_high:.4f}]  sum={ps:.4f}")
        out.append(f"  verdict  = {self.verdict}")
        out.append(f"  analytic = {self.analytic.value}")
        out.append(f"  agrees   = {self.agrees}")
        out.append(f"  thresholds = {self.thresholds}")
        return "\n".join(out) + "\n"


def wiener_verdict(p_hat: Sequence[float], diverge_fraction: float = 0.5, converge_fraction: float = 0.05) -> WienerVerdict:
    p = np.asarray(p_hat, float)
    if len(p) < 4 or p[0] <= 0:
        return WienerVerdict.INDETERMINATE
    if np.all(p[-3:] > diverge_fraction * p[0]):
        return WienerVerdict.DIVERGES
    if p[-1] < converge_fraction * p[0]:
        return WienerVerdict.CONVERGES
    return WienerVerdict.INDETERMINATE


def wiener_experiment(cfg: WienerConfig, workers: int = 1) -> WienerReport:
    ns = cfg.family.indices
    if cfg.shared:
        def trial(i):
            pp = cfg.path_for(None, seed_derivation(cfg.seed, i))
            return cfg.target.shells(pp)

        entered = _pool_map(trial, range(cfg.trials), workers)
        estimates = [wilson(sum(n in e for e in entered), cfg.trials) for n in ns]
    else:
        estimates = []
        for n in ns:
            tgt = DiagonalTarget(cfg.target.scale, cfg.target.within, cfg.family, n, cfg.target.t_min)
            gen = lambda s, n=n: cfg.path_for(n, s)
            estimates.append(mc_hitting(gen, tgt, cfg.trials, seed_derivation(cfg.seed, (1000 + n,)), workers))
    verdict = wiener_verdict([e.p_hat for e in estimates], cfg.diverge_fraction, cfg.converge_fraction)
    return WienerReport(
        ns, estimates, verdict, cfg.analytic,
        {"diverge_fraction": cfg.diverge_fraction, "converge_fraction": cfg.converge_fraction},
        cfg.label,
    )


def brownian_diagonal_config(
    trials: int = 400,
    seed: int = 0,
    lam: float = 4.0,
    n_max: int = 8,
    steps_per_shell: int = 64,
    horizon_shells: float = 4.0,
) -> WienerConfig:
    """Two Brownian motions started at (0, 1), target diag(R), annuli in phi_d = max |.|^2.

    Each annulus n is simulated at its own resolution dt_n = lam^n / steps_per_shell
    over the horizon horizon_shells * lam^(n+1); by Brownian scaling every shell
    is then sampled with the same relative accuracy.
    """
    bm = ProcessClass.brownian(1)
    sc = PowerScale.pure(2.0)
    fam = build_annuli((0.0, 1.0), lam, (sc, sc), None, (1, n_max))
    n_steps = int(round(horizon_shells * lam * steps_per_shell))

    def path_for(n, s):
        T = horizon_shells * lam ** (n + 1)
        return product_path(PathSpec(2.0, T, n_steps, 0.0), PathSpec(2.0, T, n_steps, 1.0), s)

    return WienerConfig(
        fam, DiagonalTarget(sc), path_for, trials, seed, product_J(bm, bm, 1.0),
        label="two Brownian motions, diag(R)",
    )


def transient_pair_config(
    trials: int = 1000,
    seed: int = 0,
    alpha: float = 1.2,
    lam: float = 2.5,
    n_max: int = 8,
    horizon_shells: float = 4.0,
) -> WienerConfig:
    """Two alpha-stable processes from the origin at unit resolution; target diag(F).

    F is a sparse union of unit intervals centred at +-lam^((n + 1/2)/alpha), one
    pair per annulus, so F has global dimension 0 and diag(F) is visited only
    finitely often when J^1 is finite.
    """
    proc = ProcessClass.stable(alpha, 1)
    sc = PowerScale.pure(alpha)
    centres = [lam ** ((n + 0.5) / alpha) for n in range(1, n_max + 1)]
    pieces = sorted([(c - 0.5, c + 0.5) for c in centres] + [(-c - 0.5, -c + 0.5) for c in centres])
    F = IntervalUnion(tuple(pieces))
    fam = build_annuli((0.0, 0.0), lam, (sc, sc), F, (1, n_max))
    T = horizon_shells * lam ** (n_max + 1)
    n_steps = int(round(T))

    def path_for(n, s):
        return product_path(PathSpec(alpha, T, n_steps, 0.0), PathSpec(alpha, T, n_steps, 0.0), s)

    return WienerConfig(
        fam, DiagonalTarget(sc, F, fam), path_for, trials, seed, product_J(proc, proc, 1.0),
        shared=True, label=f"two {alpha}-stable processes, sparse diag(F)",
    )


# ---------------------------------------------------------------------------
# regularity


@dataclass
class RegularityReport:
    h: list
    estimates: list
    floor: float = 0.9

    @property
    def holds(self) -> bool:
        return all(e.p_hat >= self.floor for e in self.estimates)

    def csv(self) -> str:
        lines = ["h,p_hat,ci_low,ci_high"]
        lines += [f"{h:.17g},{e.p_hat:.17g},{e.ci_low:.17g},{e.ci_high:.17g}" for h, e in zip(self.h, self.estimates)]
        return "\n".join(lines) + "\n"


def regularity_experiment(
    alphas=(2.0, 2.0),
    h_ladder=(1.0, 0.25, 0.0625, 0.015625),
    steps_per_window: int = 256,
    trials: int = 400,
    seed: int = 0,
    within: TargetSet | None = None,
    start: float = 0.0,
    workers: int = 1,
) -> RegularityReport:
    """P(the product path returns to diag(F) within (0, h]) from a start on diag(F).

    The literal event sigma = 0 is not observable on a grid, so each h is run
    at resolution h / steps_per_window and the estimates should stay high as h
    shrinks.
    """
    sc = PowerScale.pure(max(alphas))
    out = []
    for j, h in enumerate(h_ladder):
        spec1 = PathSpec(alphas[0], h, steps_per_window, start)
        spec2 = PathSpec(alphas[1], h, steps_per_window, start)
        tgt = DiagonalTarget(sc, within, t_min=h / steps_per_window)
        out.append(
            mc_hitting(lambda s: product_path(spec1, spec2, s), tgt, trials, seed_derivation(seed, (2000 + j,)), workers)
        )
    return RegularityReport(list(h_ladder), out)
