"""Experiment kinds: each turns an :class:`ExperimentConfig` into CSV text and a report.

Trials are independent and seeded by ``seed_derivation(master_seed, trial)``;
the pool only changes wall time, never the numbers written.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from . import kernels, potential
from . import subordinator as sub
from .config import ConfigError, ExperimentConfig, finite_or_none, parse_intervals
from .paths import PathSpec, product_path, subordinate_path
from .scaling import (
    DimPrediction,
    DomainError,
    PowerScale,
    ProcessClass,
    ProcessKind,
    collision_curve,
    gamma_closed_form,
    gamma_curve,
    gamma_numeric,
    predict_collision_dim,
    predict_inverse_dim,
    predict_level_dim,
)
from .seeds import seed_derivation
from .timeset import (
    Cantor,
    DimensionEstimate,
    IntervalUnion,
    Point,
    collision_hits,
    dyadic_ladder,
    estimate_dimension,
    extract_hits,
)

# memory held by one simulated path trial, in bytes per step (states,
# increments, distances, masks and draw temporaries)
BYTES_PER_STEP = 48
MEMORY_BUDGET = 1_500_000_000


@dataclass
class RunResult:
    csv: str
    report: str
    passed: bool | None = None  # None: the kind has no tolerance to check
    extra: dict = field(default_factory=dict)


def resolve_workers(requested: int | None = None) -> int:
    """Worker count: the request (default: CPU count) capped by HAUDIM_THREADS."""
    n = requested if requested else (os.cpu_count() or 1)
    cap = os.environ.get("HAUDIM_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"HAUDIM_THREADS must be an integer, got {cap!r}") from None
    return max(1, int(n))


def pool_map(fn: Callable, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _header(cfg: ExperimentConfig) -> str:
    return f"experiment: {cfg.name}\nkind: {cfg.kind}\nmaster_seed: {cfg.master_seed}\n"


def _status(passed: bool | None) -> str:
    return {None: "n/a", True: "PASS", False: "FAIL"}[passed]


# ---------------------------------------------------------------------------
# predictions


def subordinated_class(proc: ProcessClass, gamma: float) -> ProcessClass:
    if gamma == 1.0:
        return proc
    return ProcessClass(proc.volume, proc.scale.power(gamma), ProcessKind.STABLE_JUMP, proc.assumed_bounds)


def _predict(cfg: ExperimentConfig) -> RunResult:
    target = cfg.param("target")
    p1 = cfg.process(0)
    if target == "level":
        pred = predict_level_dim(p1)
    elif target == "inverse":
        pred = predict_inverse_dim(p1, cfg.param("s_F"))
    elif target == "collision":
        pred = predict_collision_dim(p1, cfg.process(1), cfg.param("s_F"), cfg.param("t_F"))
    else:
        raise ConfigError(f"unknown prediction target {target!r}")
    value = "Empty" if pred.empty else f"{pred.value:.17g}"
    csv = "target,value,regime,gamma,certified\n" + f"{target},{value},{pred.regime.value},{pred.gamma:.17g},{pred.certified}\n"
    return RunResult(csv, _header(cfg) + pred.describe() + "\n")


def _gamma(cfg: ExperimentConfig) -> RunResult:
    variant = cfg.param("variant")
    p1 = cfg.process(0)
    if variant == "single":
        curve = gamma_curve(p1)
    elif variant == "collision":
        p2 = cfg.process(1)
        curve = collision_curve(p1, p2)
    else:
        raise ConfigError(f"unknown gamma variant {variant!r}")
    d1 = p1.volume.d_local
    s_max = cfg.param("s_max") or max(curve.s0, d1) + 0.25
    grid = np.linspace(cfg.param("s_min"), s_max, int(cfg.param("s_points")))
    rows = ["s,gamma_closed,gamma_numeric,abs_diff"]
    worst = 0.0
    for s in grid:
        if variant == "single":
            closed = gamma_closed_form(p1, s)
            numeric = gamma_numeric(p1.volume, p1.scale, s, tol=cfg.param("tol"))
        else:
            a11, a21 = sorted((p1.scale.alpha_local, p2.scale.alpha_local))
            closed = curve(s)
            # the inequality-set formula, evaluated independently of GammaCurve
            numeric = (d1 - s) / a11 + d1 / a21
        diff = abs(closed - numeric)
        worst = max(worst, diff)
        rows.append(f"{s:.17g},{closed:.17g},{numeric:.17g},{diff:.17g}")
    tol = cfg.param("tol") if variant == "single" else 0.0
    passed = worst <= tol
    report = _header(cfg) + (
        f"variant: {variant}\ns0 = {curve.s0:.6g}\nmax |closed - numeric| = {worst:.3g} (tolerance {tol:g})\n"
        f"status: {_status(passed)}\n"
    )
    return RunResult("\n".join(rows) + "\n", report, passed)


# ---------------------------------------------------------------------------
# time-set dimensions


def _pure_alpha(proc: ProcessClass, which: str) -> float:
    if proc.scale.alpha_local != proc.scale.alpha_global:
        raise ConfigError(f"{which}: path simulation needs a pure stable scale (alpha_local == alpha_global)")
    if proc.volume.d_local != 1 or proc.volume.d_global != 1:
        raise ConfigError(f"{which}: path simulation runs on the line (d = 1)")
    return proc.scale.alpha_local


def _window(cfg: ExperimentConfig):
    lo, hi = finite_or_none(cfg.param("window_lo")), finite_or_none(cfg.param("window_hi"))
    if lo is None and hi is None:
        return None
    n, T = cfg.param("n_steps"), cfg.param("T")
    dt = T / n
    return (lo or 16.0 * dt, hi or T / 64.0)


@dataclass
class DimensionBatch:
    prediction: DimPrediction
    estimates: list
    tolerance: float
    empty_fraction: float

    @property
    def slopes(self) -> np.ndarray:
        return np.array([e.slope for e in self.estimates if not e.empty])

    @property
    def n_empty(self) -> int:
        return sum(e.empty for e in self.estimates)

    @property
    def median(self) -> float:
        s = self.slopes
        return float(np.median(s)) if s.size else math.nan

    @property
    def passed(self) -> bool:
        if self.prediction.empty:
            return self.n_empty >= self.empty_fraction * len(self.estimates)
        m = self.median
        return math.isfinite(m) and abs(m - self.prediction.value) <= self.tolerance

    def csv(self) -> str:
        return "trial,slope,stderr\n" + "".join(e.row(i) + "\n" for i, e in enumerate(self.estimates))

    def report(self) -> str:
        buf = io.StringIO()
        buf.write(self.prediction.describe() + "\n")
        buf.write(f"trials: {len(self.estimates)}, empty: {self.n_empty}\n")
        if self.prediction.empty:
            buf.write(f"empty fraction {self.n_empty / len(self.estimates):.3f} (required >= {self.empty_fraction:g})\n")
        else:
            s = self.slopes
            if s.size:
                buf.write(
                    f"estimate: median slope {self.median:.4f} "
                    f"(quartiles {np.quantile(s, 0.25):.4f}, {np.quantile(s, 0.75):.4f})\n"
                )
            buf.write(f"tolerance: |median - {self.prediction.value:.4f}| <= {self.tolerance:g}\n")
        buf.write(f"status: {_status(self.passed)}\n")
        return buf.getvalue()


def run_dimension_batch(
    trial: Callable[[int], DimensionEstimate],
    prediction: DimPrediction,
    master_seed: int,
    trials: int,
    n_steps: int,
    tolerance: float,
    empty_fraction: float,
    workers: int = 1,
) -> DimensionBatch:
    # keep concurrent paths inside the memory budget; seeds fix the numbers
    workers = max(1, min(workers, MEMORY_BUDGET // max(1, n_steps * BYTES_PER_STEP)))
    ests = pool_map(lambda i: trial(seed_derivation(master_seed, i)), range(trials), workers)
    return DimensionBatch(prediction, ests, tolerance, empty_fraction)


def level_dim_batch(
    alpha: float,
    level: float = 0.0,
    x0: float = 0.0,
    n_steps: int = 1_000_000,
    T: float = 1.0,
    trials: int = 20,
    seed: int = 0,
    gamma: float = 1.0,
    window=None,
    tolerance: float = 0.07,
    empty_fraction: float = 0.95,
    workers: int = 1,
    proc: ProcessClass | None = None,
) -> DimensionBatch:
    proc = proc or ProcessClass.stable(alpha, 1.0)
    pred = predict_level_dim(subordinated_class(proc, gamma))
    spec = PathSpec(alpha, T, n_steps, x0)
    scale = PowerScale.pure(alpha * gamma)
    ladder = dyadic_ladder(spec.dt, T)
    target = Point(level)

    def trial(s):
        path = subordinate_path(spec, gamma, s)
        return estimate_dimension(extract_hits(path, target, scale, ladder), window)

    return run_dimension_batch(trial, pred, seed, trials, n_steps, tolerance, empty_fraction, workers)


def inverse_dim_batch(
    alpha: float,
    target,
    x0: float = 0.0,
    n_steps: int = 1_000_000,
    T: float = 1.0,
    trials: int = 20,
    seed: int = 0,
    gamma: float = 1.0,
    window=None,
    tolerance: float = 0.10,
    empty_fraction: float = 0.95,
    workers: int = 1,
    proc: ProcessClass | None = None,
) -> DimensionBatch:
    proc = proc or ProcessClass.stable(alpha, 1.0)
    pred = predict_inverse_dim(subordinated_class(proc, gamma), target.nominal_dim)
    spec = PathSpec(alpha, T, n_steps, x0)
    scale = PowerScale.pure(alpha * gamma)
    ladder = dyadic_ladder(spec.dt, T)

    def trial(s):
        path = subordinate_path(spec, gamma, s)
        return estimate_dimension(extract_hits(path, target, scale, ladder), window)

    return run_dimension_batch(trial, pred, seed, trials, n_steps, tolerance, empty_fraction, workers)


def collision_dim_batch(
    alpha1: float,
    alpha2: float,
    within=None,
    x0: tuple = (0.0, 0.0),
    n_steps: int = 1_000_000,
    T: float = 1.0,
    trials: int = 20,
    seed: int = 0,
    gamma: float = 1.0,
    window=None,
    tolerance: float = 0.08,
    empty_fraction: float = 0.95,
    workers: int = 1,
    procs: tuple | None = None,
) -> DimensionBatch:
    p1, p2 = procs or (ProcessClass.stable(alpha1, 1.0), ProcessClass.stable(alpha2, 1.0))
    if within is None:
        s_F, t_F = p1.volume.d_local, p1.volume.d_global
    else:
        # bounded targets have global dimension 0
        s_F, t_F = within.nominal_dim, 0.0
    pred = predict_collision_dim(subordinated_class(p1, gamma), subordinated_class(p2, gamma), s_F, t_F)
    spec1 = PathSpec(alpha1, T, n_steps, x0[0])
    spec2 = PathSpec(alpha2, T, n_steps, x0[1])
    # the component with the larger walk dimension sets the spatial tolerance
    scale = PowerScale.pure(max(alpha1, alpha2) * gamma)
    ladder = dyadic_ladder(spec1.dt, T)

    def trial(s):
        pp = product_path(spec1, spec2, s, gamma)
        return estimate_dimension(collision_hits(pp, scale, ladder, within), window)

    return run_dimension_batch(trial, pred, seed, trials, n_steps, tolerance, empty_fraction, workers)


def _sim_kwargs(cfg: ExperimentConfig, workers: int) -> dict:
    return dict(
        n_steps=int(cfg.param("n_steps")),
        T=cfg.param("T"),
        trials=int(cfg.param("trials")),
        seed=cfg.master_seed,
        gamma=cfg.param("gamma"),
        window=_window(cfg),
        tolerance=cfg.param("tolerance"),
        empty_fraction=cfg.param("empty_fraction"),
        workers=workers,
    )


def _finish(cfg: ExperimentConfig, batch: DimensionBatch) -> RunResult:
    return RunResult(batch.csv(), _header(cfg) + batch.report(), batch.passed)


def _level_dim(cfg: ExperimentConfig, workers: int) -> RunResult:
    proc = cfg.process(0)
    alpha = _pure_alpha(proc, "process.1")
    batch = level_dim_batch(alpha, cfg.param("level"), cfg.param("x0"), proc=proc, **_sim_kwargs(cfg, workers))
    return _finish(cfg, batch)


def _target_from(cfg: ExperimentConfig, key: str):
    kind = cfg.param(key)
    if kind == "cantor":
        return Cantor(cfg.param("cantor_ratio"), int(cfg.param("cantor_level")))
    if kind == "intervals":
        return IntervalUnion(parse_intervals(cfg.param("intervals")))
    if kind == "none":
        return None
    raise ConfigError(f"unknown target {kind!r}")


def _inverse_dim(cfg: ExperimentConfig, workers: int) -> RunResult:
    proc = cfg.process(0)
    alpha = _pure_alpha(proc, "process.1")
    target = _target_from(cfg, "target")
    if target is None:
        raise ConfigError("inverse-dim needs a target set")
    batch = inverse_dim_batch(alpha, target, cfg.param("x0"), proc=proc, **_sim_kwargs(cfg, workers))
    return _finish(cfg, batch)


def _collision_dim(cfg: ExperimentConfig, workers: int) -> RunResult:
    p1, p2 = cfg.process(0), cfg.process(1)
    a1, a2 = _pure_alpha(p1, "process.1"), _pure_alpha(p2, "process.2")
    within = _target_from(cfg, "within")
    batch = collision_dim_batch(
        a1, a2, within, (cfg.param("x0_1"), cfg.param("x0_2")), procs=(p1, p2), **_sim_kwargs(cfg, workers)
    )
    return _finish(cfg, batch)


# ---------------------------------------------------------------------------
# kernels, subordinator, energy, Wiener


def _kernel_check(cfg: ExperimentConfig, workers: int) -> RunResult:
    alpha, gamma, tol = cfg.param("alpha"), cfg.param("gamma"), cfg.param("trend_tol")
    half = cfg.param("t_decades") / 2.0
    t_grid = np.geomspace(10**-half, 10**half, int(4 * 2 * half) + 1)
    if gamma < 1.0:
        reports = kernels.check_subordinate_bounds(alpha, gamma, t_grid=t_grid)
    else:
        grid = kernels.KernelGrid.stable(alpha, t_grid)
        reports = [kernels.check_ndlhk(alpha, grid)]
        if alpha < 2:
            reports.insert(0, kernels.check_wuhk(alpha, grid))
    rows = ["report,t,x,ratio"]
    for k, rep in enumerate(reports):
        rows += [f"{k},{t:.17g},{x:.17g},{r:.17g}" for t, x, r in rep.rows]
    passed = all(abs(r.trend_slope) <= tol and 0 < r.ratio_min <= r.ratio_max < math.inf for r in reports)
    report = _header(cfg) + "".join(f"[{k}] " + r.table() for k, r in enumerate(reports))
    report += f"trend tolerance: |slope| <= {tol:g}\nstatus: {_status(passed)}\n"
    return RunResult("\n".join(rows) + "\n", report, passed)


def _subordinator_check(cfg: ExperimentConfig, workers: int) -> RunResult:
    spec = sub.SubordinatorSpec(cfg.param("gamma"), cfg.param("t"))
    n = int(cfg.param("samples"))
    samples = sub.sample_subordinator(spec, n, seed_derivation(cfg.master_seed, 0))
    rows = sub.laplace_check(samples, spec)
    csv = "lam,mean,stderr,target,z\n" + "".join(
        f"{r['lam']:.17g},{r['mean']:.17g},{r['stderr']:.17g},{r['target']:.17g},{r['z']:.17g}\n" for r in rows
    )
    z_ok = all(abs(r["z"]) <= cfg.param("z_max") for r in rows)
    lines = [f"Laplace transform: max |z| = {max(abs(r['z']) for r in rows):.3f} (limit {cfg.param('z_max'):g})"]
    passed = z_ok
    if spec.gamma == 0.5:
        ks = stats.kstest(samples, lambda s: sub.half_stable_cdf(s, spec.t)).statistic
        lines.append(f"KS distance to erfc CDF = {ks:.5f} (limit {cfg.param('ks_tol'):g})")
        passed = passed and ks < cfg.param("ks_tol")
    if not spec.degenerate and n >= 100_000:
        knee = spec.t ** (1.0 / spec.gamma)
        rep = sub.check_density_bounds(spec, samples, np.geomspace(knee * 0.3, knee * 1e3, 40))
        lines.append(rep.table().rstrip())
    report = _header(cfg) + "\n".join(lines) + f"\nstatus: {_status(passed)}\n"
    return RunResult(csv, report, passed)


def _energy(cfg: ExperimentConfig, workers: int) -> RunResult:
    r = cfg.param("ratio")
    s_grid = np.round(np.arange(cfg.param("s_min"), cfg.param("s_max") + 1e-9, cfg.param("s_step")), 10)
    levels = range(int(cfg.param("level_min")), int(cfg.param("level_max")) + 1)
    br = potential.frostman_bracket(r, s_grid, levels)
    dim = math.log(2.0) / math.log(1.0 / r)
    passed = math.isfinite(br.flip) and abs(br.flip - dim) <= cfg.param("tolerance")
    report = _header(cfg) + (
        f"Cantor ratio {r:.6g}, levels {levels.start}..{levels.stop - 1}\n"
        f"last FiniteEnergy exponent: {br.last_finite:.4f}\n"
        f"verdict flips to DivergentEnergy at s = {br.flip:.4f}\n"
        f"similarity dimension log2/log(1/r) = {dim:.4f}\n"
        f"tolerance: |flip - dimension| <= {cfg.param('tolerance'):g}\nstatus: {_status(passed)}\n"
    )
    return RunResult(br.csv(), report, passed)


def _wiener(cfg: ExperimentConfig, workers: int) -> RunResult:
    design = cfg.param("design")
    makers = {"brownian": potential.brownian_diagonal_config, "transient": potential.transient_pair_config}
    if design not in makers:
        raise ConfigError(f"unknown Wiener design {design!r}")
    reps = []
    for r in range(int(cfg.param("replicates"))):
        wc = makers[design](trials=int(cfg.param("trials")), seed=seed_derivation(cfg.master_seed, r), n_max=int(cfg.param("n_max")))
        reps.append(potential.wiener_experiment(wc, workers))
    n_agree = sum(rep.agrees for rep in reps)
    passed = n_agree >= cfg.param("min_agree")
    summary = "replicate,verdict,analytic,agrees\n" + "".join(
        f"{i},{rep.verdict},{rep.analytic.value},{rep.agrees}\n" for i, rep in enumerate(reps)
    )
    report = _header(cfg) + reps[0].table() + (
        f"replicates agreeing with the analytic classification: {n_agree}/{len(reps)} "
        f"(required {cfg.param('min_agree')})\nstatus: {_status(passed)}\n"
    )
    return RunResult(reps[0].csv(), report, passed, {"replicates.csv": summary})


RUNNERS = {
    "predict": lambda cfg, w: _predict(cfg),
    "gamma": lambda cfg, w: _gamma(cfg),
    "level-dim": _level_dim,
    "inverse-dim": _inverse_dim,
    "collision-dim": _collision_dim,
    "kernel-check": _kernel_check,
    "subordinator-check": _subordinator_check,
    "energy": _energy,
    "wiener": _wiener,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    try:
        return RUNNERS[cfg.kind](cfg, workers)
    except DomainError as e:
        raise ConfigError(str(e)) from e
