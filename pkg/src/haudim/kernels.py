"""Stable heat kernels, subordinated kernels, resolvents and Green functions on the line.

Kernels are densities of the symmetric alpha-stable law with characteristic
function exp(-t |xi|**alpha) (alpha = 2 is the Gaussian with variance 2t).

Two independent numerical routes are kept on purpose:

* :func:`stable_kernel` uses Zolotarev's non-oscillatory integral, which is
  accurate far into the tails;
* :func:`fourier_kernel` integrates the inverse Fourier transform with
  composite Gauss-Legendre panels up to an analytic tail cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, optimize, special

from . import subordinator as sub
from .reports import BoundReport, log_slope
from .scaling import DomainError, Integral, ProcessClass, product_J

ABS_TOL = 1e-8


class QuadratureError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual estimate {residual:.3g})")
        self.residual = residual


class DivergentGreenError(ValueError):
    pass


def _check_alpha(alpha: float) -> None:
    if not (0 < alpha <= 2):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")


# ---------------------------------------------------------------------------
# standardised density f_alpha(y), t = 1


def _zolotarev_unit(y: float, alpha: float) -> float:
    """Density at y > 0 of exp(-|xi|**alpha), alpha not in {1, 2}.

    The theta range (0, pi/2) is split at pi/4; the upper half is integrated
    in phi = pi/2 - theta so that cos(theta) = sin(phi) keeps full relative
    precision.  Depending on y and alpha the mass concentrates near either
    end, so each half gets multiplicative breakpoints around the peak.
    """
    a = alpha
    half = math.pi / 2
    quarter = math.pi / 4
    log_z = a / (a - 1.0) * math.log(y)
    k = a / (1.0 - a)

    def log_g_theta(th):
        c = math.cos(th)
        return log_z + k * (math.log(math.sin(a * th)) - math.log(c)) + math.log(math.cos((1.0 - a) * th)) - math.log(c)

    def log_g_phi(ph):
        th = half - ph
        c = math.sin(ph)
        return log_z + k * (math.log(math.sin(a * th)) - math.log(c)) + math.log(math.cos((1.0 - a) * th)) - math.log(c)

    def piece(log_g):
        def h(v):
            lg = log_g(v)
            if lg > 700:
                return 0.0
            g = math.exp(lg)
            return g * math.exp(-g)

        lo = 1e-300
        pts = [lo, quarter]
        # g e^{-g} peaks where g = 1, and g is monotone in theta
        try:
            if log_g(1e-280) * log_g(quarter) < 0:
                peak = optimize.brentq(log_g, 1e-280, quarter, xtol=1e-300, rtol=1e-14)
                pts = [lo] + [peak * f for f in (1e-6, 1e-3, 1.0, 1e3, 1e6) if lo < peak * f < quarter] + [quarter]
        except (ValueError, ZeroDivisionError):
            pass
        total, err = 0.0, 0.0
        for a0, b0 in zip(pts, pts[1:]):
            v, e, *_ = integrate.quad(h, a0, b0, limit=400, epsabs=0.0, epsrel=1e-12, full_output=1)
            total += v
            err += e
        return total, err

    t1, e1 = piece(log_g_theta)
    t2, e2 = piece(log_g_phi)
    total, err = t1 + t2, e1 + e2
    if err > max(1e-9 * total, 1e-14):
        raise QuadratureError("Zolotarev integral did not converge", err)
    return a / (math.pi * abs(a - 1.0)) * total / y


def stable_kernel(alpha: float, t: float, x: float) -> float:
    """p(t, 0, x) for the symmetric alpha-stable process."""
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError("t must be positive")
    x = abs(float(x))
    if alpha == 2.0:
        return math.exp(-x * x / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    if alpha == 1.0:
        return t / (math.pi * (t * t + x * x))
    scale = t ** (1.0 / alpha)
    y = x / scale
    if y == 0.0:
        return special.gamma(1.0 + 1.0 / alpha) / (math.pi * scale)
    if abs(alpha - 1.0) < NEAR_CAUCHY:
        # Zolotarev's exponents alpha/(1-alpha) blow up here
        if y <= 50.0:
            return fourier_kernel(alpha, 1.0, y) / scale
        return _tail_series(y, alpha) / scale
    return _zolotarev_unit(y, alpha) / scale


NEAR_CAUCHY = 0.05


def _tail_series(y: float, alpha: float) -> float:
    """(1/pi) sum_k (-1)^(k+1) Gamma(k alpha + 1)/k! sin(k pi alpha/2) y^(-k alpha - 1), for large y."""
    total, prev = 0.0, math.inf
    for k in range(1, 200):
        # magnitude without the sine, which can nearly vanish for some k
        mag = math.exp(special.gammaln(k * alpha + 1) - special.gammaln(k + 1) - (k * alpha + 1) * math.log(y))
        if mag > prev:
            break
        total += (-1) ** (k + 1) * mag * math.sin(k * math.pi * alpha / 2)
        prev = mag
        if mag < 1e-17 * abs(total):
            break
    return total / math.pi


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def fourier_kernel(alpha: float, t: float, x: float, panels: int = 64, tail_eps: float = 1e-18) -> float:
    """(1/pi) int_0^Xi exp(-t xi^alpha) cos(xi x) d xi with composite Gauss-Legendre.

    Xi is chosen so that the discarded tail, bounded by
    int_Xi^inf exp(-t xi^alpha) d xi <= exp(-t Xi^alpha) Xi^(1-alpha) / (alpha t),
    is below ``tail_eps``.
    """
    _check_alpha(alpha)
    xi_max = (max(-math.log(tail_eps), 1.0) / t) ** (1.0 / alpha)
    for _ in range(60):
        tail = math.exp(-t * xi_max**alpha) * xi_max ** (1.0 - alpha) / (alpha * t)
        if tail < tail_eps:
            break
        xi_max *= 1.2
    # at least a few panels per oscillation
    panels = max(panels, int(xi_max * abs(x) / math.pi) * 2 + 1)
    edges = np.linspace(0.0, xi_max, panels + 1)
    # grade the first panel geometrically: the integrand has a xi^alpha cusp at 0
    edges = np.concatenate([[0.0], edges[1] * np.geomspace(1e-12, 1.0, 48)[:-1], edges[1:]])
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    xi = mid + half * _GL_X[None, :]
    vals = np.exp(-t * xi**alpha) * np.cos(xi * x)
    return float((half * vals * _GL_W[None, :]).sum()) / math.pi


def stable_cdf(alpha: float, t: float, x, panels: int = 400) -> np.ndarray:
    """P(X_t <= x) via the Gil-Pelaez inversion of exp(-t |xi|**alpha)."""
    _check_alpha(alpha)
    x = np.atleast_1d(np.asarray(x, float))
    xi_max = (40.0 / t) ** (1.0 / alpha)
    edges = np.linspace(0.0, xi_max, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    xi = (mid + half * _GL_X[None, :]).ravel()
    w = (half * _GL_W[None, :]).ravel() * np.exp(-t * xi**alpha) / xi
    out = np.empty_like(x)
    for i in range(0, len(x), 512):
        chunk = x[i : i + 512]
        out[i : i + 512] = 0.5 + np.sin(np.outer(chunk, xi)) @ w / math.pi
    return out


def stable_kernel_vec(alpha: float, t: float, x) -> np.ndarray:
    return np.array([stable_kernel(alpha, t, xi) for xi in np.ravel(x)])


# ---------------------------------------------------------------------------
# bound checks for the base process

DEFAULT_T_GRID = np.geomspace(1e-2, 1e2, 17)
DEFAULT_X_GRID = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 25)])


@dataclass
class KernelGrid:
    t_grid: np.ndarray
    x_grid: np.ndarray
    values: np.ndarray

    @classmethod
    def stable(cls, alpha: float, t_grid=DEFAULT_T_GRID, x_grid=DEFAULT_X_GRID) -> "KernelGrid":
        t_grid, x_grid = np.asarray(t_grid, float), np.asarray(x_grid, float)
        vals = np.array([[stable_kernel(alpha, t, x) for x in x_grid] for t in t_grid])
        return cls(t_grid, x_grid, vals)


def check_wuhk(alpha: float, grid: KernelGrid | None = None) -> BoundReport:
    """p(t, x) against t^(-1/alpha) ^ t |x|^(-1-alpha); trend of the per-t maximum."""
    grid = grid or KernelGrid.stable(alpha)
    rows, per_t = [], []
    x = grid.x_grid
    far = np.full_like(x, np.inf)
    far[x > 0] = x[x > 0] ** (-1.0 - alpha)
    for i, t in enumerate(grid.t_grid):
        env = np.minimum(t ** (-1.0 / alpha), t * far)
        r = grid.values[i] / env
        per_t.append(r.max())
        rows += [(float(t), float(x), float(v)) for x, v in zip(grid.x_grid, r)]
    ratios = np.array([r for _, _, r in rows])
    return BoundReport(
        f"WUHK alpha={alpha}", float(ratios.min()), float(ratios.max()), log_slope(grid.t_grid, per_t),
        grid={"t": grid.t_grid.tolist(), "x": grid.x_grid.tolist()}, rows=rows,
    )


def check_ndlhk(alpha: float, grid: KernelGrid | None = None, c0: float = 1.0) -> BoundReport:
    """min over |x| <= c0 t^(1/alpha) of p(t, x) t^(1/alpha)."""
    grid = grid or KernelGrid.stable(alpha)
    rows, per_t = [], []
    for i, t in enumerate(grid.t_grid):
        near = grid.x_grid <= c0 * t ** (1.0 / alpha)
        r = grid.values[i][near] * t ** (1.0 / alpha)
        if r.size:
            per_t.append(r.min())
            rows += [(float(t), float(x), float(v)) for x, v in zip(grid.x_grid[near], r)]
    ratios = np.array([r for _, _, r in rows])
    return BoundReport(
        f"NDLHK alpha={alpha}", float(ratios.min()), float(ratios.max()),
        log_slope(grid.t_grid[: len(per_t)], per_t), rows=rows, notes={"c0": c0},
    )


# ---------------------------------------------------------------------------
# subordinated kernels


def _sub_density(gamma: float, t: float, s):
    c = t ** (-1.0 / gamma)
    return c * sub.unit_density_table(gamma)(np.asarray(s, float) * c)


def _log_s_range(gamma: float, t: float, decay: float, far: float = 0.0) -> tuple[float, float]:
    """log-s window outside which pi_t(s) * (integrand) is negligible.

    Below the knee t^(1/gamma) the density behaves like exp(-c (s/knee)^(-kappa));
    above it the integrand decays like s^(-decay).
    """
    knee = math.log(t) / gamma
    kappa = gamma / (1.0 - gamma)
    c = (1.0 - gamma) * gamma**kappa
    lo = knee - math.log(720.0 / c) / kappa
    hi = max(knee, far) + 40.0 / decay
    return lo, hi


def subordinated_kernel(
    alpha: float,
    gamma: float,
    t: float,
    x: float,
    method: str = "quadrature",
    n: int = 200_000,
    seed: int = 0,
    return_error: bool = False,
):
    """q(t, x) = int_0^inf p(s, x) pi_t(s) ds.

    ``method="quadrature"`` integrates in log s against the tabulated
    subordinator density (closed form at gamma = 1/2); ``method="monte_carlo"``
    averages p(tau_i, x) over subordinator samples, optionally returning the
    standard error.
    """
    _check_alpha(alpha)
    spec = sub.SubordinatorSpec(gamma, t)
    if spec.degenerate:
        val = stable_kernel(alpha, t, x)
        return (val, 0.0) if return_error else val
    if method == "monte_carlo":
        taus = sub.sample_subordinator(spec, n, seed)
        vals = _kernel_many(alpha, taus, x)
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(n))
        return (mean, se) if return_error else mean
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    x = abs(float(x))
    knee = math.log(t) / gamma
    cross = alpha * math.log(x) if x > 0 else knee
    lo, hi = _log_s_range(gamma, t, gamma + 1.0 / alpha, cross)

    def integrand(u):
        s = math.exp(u)
        return float(_kernel_many(alpha, s, x) * _sub_density(gamma, t, s)) * s

    pts = sorted({knee, min(max(cross, lo), hi)})
    val, err, *_ = integrate.quad(integrand, lo, hi, points=pts, limit=500, epsabs=0.0, epsrel=1e-11, full_output=1)
    if err > 1e-5 * val + 1e-16:
        raise QuadratureError("subordination integral did not converge", err)
    return (val, err) if return_error else val


def _kernel_many(alpha: float, ts: np.ndarray, x: float) -> np.ndarray:
    ts = np.asarray(ts, float)
    if alpha == 2.0:
        return np.exp(-x * x / (4.0 * ts)) / np.sqrt(4.0 * math.pi * ts)
    if alpha == 1.0:
        return ts / (math.pi * (ts * ts + x * x))
    scale = ts ** (1.0 / alpha)
    return unit_kernel_table(alpha)(abs(x) / scale) / scale


@lru_cache(maxsize=16)
def unit_kernel_table(alpha: float):
    """Vectorised f_alpha(y) = p(1, 0, y): cubic spline of log f against log y.

    Uses f(0) below the table and the leading power tail above it.
    """
    ys = np.geomspace(1e-6, 1e6, 1441)
    lf = np.log([stable_kernel(alpha, 1.0, y) for y in ys])
    spline = interpolate.CubicSpline(np.log(ys), lf)
    f0 = stable_kernel(alpha, 1.0, 0.0)
    tail_c = special.gamma(1.0 + alpha) * math.sin(math.pi * alpha / 2.0) / math.pi
    lo, hi = math.log(ys[0]), math.log(ys[-1])

    def f(y):
        y = np.asarray(y, float)
        out = np.empty_like(y)
        u = np.log(np.maximum(y, 1e-300))
        small, big = u < lo, u > hi
        mid = ~(small | big)
        out[small] = f0
        out[big] = tail_c * y[big] ** (-1.0 - alpha)
        out[mid] = np.exp(spline(u[mid]))
        return out

    return f


def subordinated_char(alpha: float, gamma: float, t: float, xi: float) -> float:
    """Fourier transform of q(t, .) at xi: int exp(-s |xi|^alpha) pi_t(s) ds by quadrature."""
    lam = abs(xi) ** alpha
    if lam == 0:
        return 1.0
    if gamma == 1.0:
        return math.exp(-t * lam)
    knee = math.log(t) / gamma
    lo, hi = _log_s_range(gamma, t, gamma)
    hi = min(hi, math.log(750.0 / lam))

    def integrand(u):
        s = math.exp(u)
        return math.exp(-lam * s) * float(_sub_density(gamma, t, s)) * s

    pts = sorted({min(max(knee, lo), hi), min(max(-math.log(lam), lo), hi)})
    val, *_ = integrate.quad(integrand, lo, hi, points=pts, limit=500, epsabs=1e-15, epsrel=1e-12, full_output=1)
    return val


# ---------------------------------------------------------------------------
# resolvents


def _resolvent_envelope_near(alpha_eff: float, r: float) -> float:
    """int_{r^a}^inf e^{-t} / V((phi^gamma)^{-1}(t)) dt with V(r)=r, phi^gamma(r)=r^a."""
    lower = r**alpha_eff
    p = 1.0 - 1.0 / alpha_eff
    if p > 0:
        # upper incomplete gamma Gamma(p, lower)
        return float(special.gammaincc(p, lower) * special.gamma(p))
    val, _ = integrate.quad(lambda u: math.exp(-math.exp(u)) * math.exp(u * p), math.log(lower), math.log(lower) + 80, limit=400)
    return val


def resolvent_envelope(alpha: float, gamma: float, x: float) -> float:
    a = alpha * gamma
    r = abs(x)
    if r <= 1.0:
        return _resolvent_envelope_near(a, r)
    return 1.0 / (r * r**a)


def resolvent(alpha: float, gamma: float, lam: float, x: float) -> float:
    """u_lam(0, x) = int_0^inf e^{-lam t} q(t, x) dt, with q the (alpha gamma)-stable kernel."""
    a = alpha * gamma
    r = abs(x)
    if r == 0 and a <= 1.0:
        return math.inf

    def integrand(u):
        t = math.exp(u)
        return math.exp(-lam * t) * float(_kernel_many(a, t, r)) * t

    centre = a * math.log(r) if r > 0 else 0.0
    lo = min(centre, 0.0) - 40.0
    hi = math.log(60.0 / lam) + 2.0
    pts = sorted({min(max(centre, lo + 1), hi - 1), 0.0})
    val, *_ = integrate.quad(integrand, lo, hi, points=pts, limit=400, epsabs=0.0, epsrel=1e-10, full_output=1)
    return val


def check_subordinate_bounds(
    alpha: float,
    gamma: float,
    t_grid=None,
    x_grid=None,
    r_grid=None,
) -> list[BoundReport]:
    """Three reports for the subordinate process on the line with V(r)=r, phi(r)=r^alpha.

    on-diagonal:  q(t, 0) * V((phi^gamma)^{-1}(t))
    off-diagonal: q(t, x) / (1/V((phi^gamma)^{-1}(t)) ^ t/(V(|x|) phi^gamma(|x|)))
    resolvent:    u_1(0, x) / envelope(x), near and far envelopes
    """
    a = alpha * gamma
    t_grid = np.geomspace(1e-2, 1e2, 9) if t_grid is None else np.asarray(t_grid, float)
    if x_grid is None:
        # keep the crossover |x| = t^(1/(alpha gamma)) inside the grid for every t
        x_grid = np.geomspace(t_grid.min() ** (1.0 / a) / 30.0, t_grid.max() ** (1.0 / a) * 30.0, 13)
    x_grid = np.asarray(x_grid, float)
    r_grid = np.geomspace(1e-3, 1e3, 13) if r_grid is None else np.asarray(r_grid, float)

    diag = np.array([subordinated_kernel(alpha, gamma, t, 0.0) * t ** (1.0 / a) for t in t_grid])
    rep_diag = BoundReport(
        f"on-diagonal q(t,x,x) V((phi^g)^-1(t)) alpha={alpha} gamma={gamma}",
        float(diag.min()), float(diag.max()), log_slope(t_grid, diag),
        rows=[(float(t), 0.0, float(v)) for t, v in zip(t_grid, diag)],
    )

    rows, per_t = [], []
    for t in t_grid:
        q = np.array([subordinated_kernel(alpha, gamma, t, x) for x in x_grid])
        env = np.minimum(t ** (-1.0 / a), t / (x_grid * x_grid**a))
        r = q / env
        per_t.append(r.max())
        rows += [(float(t), float(x), float(v)) for x, v in zip(x_grid, r)]
    ratios = np.array([v for _, _, v in rows])
    rep_off = BoundReport(
        f"off-diagonal upper envelope alpha={alpha} gamma={gamma}",
        float(ratios.min()), float(ratios.max()), log_slope(t_grid, per_t), rows=rows,
    )

    u = np.array([resolvent(alpha, gamma, 1.0, r) for r in r_grid])
    env = np.array([resolvent_envelope(alpha, gamma, r) for r in r_grid])
    ratio = u / env
    rep_res = BoundReport(
        f"resolvent u_1 envelopes alpha={alpha} gamma={gamma}",
        float(ratio.min()), float(ratio.max()), log_slope(r_grid, ratio),
        rows=[(1.0, float(r), float(v)) for r, v in zip(r_grid, ratio)], trend_axis="x",
    )
    return [rep_diag, rep_off, rep_res]


# ---------------------------------------------------------------------------
# product Green function


def _product_kernel(alpha1: float, alpha2: float, s: float, z1: float, z2: float) -> float:
    return stable_kernel(alpha1, s, z1) * stable_kernel(alpha2, s, z2)


def green_product(
    p1: ProcessClass,
    p2: ProcessClass,
    gamma: float,
    x_pair: tuple,
    y_pair: tuple,
) -> float:
    """u_0^gamma(x, y) for the gamma-subordinate direct product of two stable processes on R.

    The gamma-stable subordinator has potential density s^(gamma-1)/Gamma(gamma), so
    u_0^gamma(x, y) = int_0^inf p1(s, z1) p2(s, z2) s^(gamma-1) ds / Gamma(gamma).
    """
    if product_J(p1, p2, gamma) is Integral.INFINITE:
        raise DivergentGreenError("Green function divergent: the subordinate product is recurrent")
    a1, a2 = p1.scale.alpha_local, p2.scale.alpha_local
    if p1.scale.alpha_global != a1 or p2.scale.alpha_global != a2:
        raise DomainError("green_product samples pure stable components only")
    z1 = abs(x_pair[0] - y_pair[0])
    z2 = abs(x_pair[1] - y_pair[1])
    if z1 == 0 and z2 == 0:
        # near s = 0 the integrand behaves like s^(gamma - 1 - 1/a1 - 1/a2)
        if gamma - 1.0 / a1 - 1.0 / a2 <= 0:
            return math.inf

    def integrand(u):
        s = math.exp(u)
        return _product_kernel(a1, a2, s, z1, z2) * s**gamma

    scales = [a * math.log(z) for a, z in ((a1, z1), (a2, z2)) if z > 0]
    centre = max(scales) if scales else 0.0
    lo = centre - 60.0
    decay = 1.0 / a1 + 1.0 / a2 - gamma
    hi = centre + 40.0 / decay
    pts = sorted(set(min(max(c, lo + 1), hi - 1) for c in scales + [centre]))
    val, err = integrate.quad(integrand, lo, hi, points=pts or None, limit=500, epsabs=0.0, epsrel=1e-9)
    # analytic tail beyond hi: p1 p2 ~ p1(s,0) p2(s,0)
    c1 = special.gamma(1 + 1 / a1) / math.pi
    c2 = special.gamma(1 + 1 / a2) / math.pi
    val += c1 * c2 * math.exp(-decay * hi) / decay
    return val / special.gamma(gamma)


def green_envelope(a1: float, a2: float, gamma: float, z1: float, z2: float) -> float:
    """int_{phi_d^gamma}^inf dt / (V((phi1^g)^-1(t)) V((phi2^g)^-1(t))) with V(r)=r, phi_i = r^a_i."""
    phi_d = max(z1**a1, z2**a2)
    lower = phi_d**gamma
    rate = 1.0 / (gamma * a1) + 1.0 / (gamma * a2)
    if rate <= 1:
        return math.inf
    return lower ** (1.0 - rate) / (rate - 1.0)


def diagonal_tail_integral(p1: ProcessClass, p2: ProcessClass, gamma: float = 1.0) -> float:
    """int_1^inf of the on-diagonal product integrand; finite exactly when J^gamma is."""
    a1, a2 = p1.scale.alpha_global, p2.scale.alpha_global
    decay = 1.0 / a1 + 1.0 / a2 - gamma
    if decay <= 0:
        return math.inf
    val, _ = integrate.quad(
        lambda u: _product_kernel(a1, a2, math.exp(u), 0.0, 0.0) * math.exp(u * gamma), 0.0, 200.0 / decay, limit=400
    )
    return val / special.gamma(gamma)


def check_green_product(
    p1: ProcessClass,
    p2: ProcessClass,
    gamma: float = 1.0,
    radii=None,
    directions=None,
) -> BoundReport:
    """Ratio u_0^gamma / envelope along rays z = r (cos th, sin th); trend vs r."""
    radii = np.geomspace(1e-2, 1.0, 9) if radii is None else np.asarray(radii, float)
    directions = np.linspace(0.1, math.pi / 2 - 0.1, 5) if directions is None else np.asarray(directions, float)
    a1, a2 = p1.scale.alpha_local, p2.scale.alpha_local
    rows, per_r = [], []
    for r in radii:
        vals = []
        for th in directions:
            z1, z2 = r * math.cos(th), r * math.sin(th)
            u = green_product(p1, p2, gamma, (0.0, 0.0), (z1, z2))
            vals.append(u / green_envelope(a1, a2, gamma, z1, z2))
            rows.append((float(r), float(th), float(vals[-1])))
        per_r.append(max(vals))
    ratios = np.array([v for _, _, v in rows])
    return BoundReport(
        f"product Green function gamma={gamma} alphas=({a1},{a2})",
        float(ratios.min()), float(ratios.max()), log_slope(radii, per_r), rows=rows, trend_axis="r",
    )


# ---------------------------------------------------------------------------
# sanity integrals


def chapman_kolmogorov(alpha: float, t: float, s: float, x: float) -> tuple[float, float]:
    """(int p(t, 0, z) p(s, z, x) dz, p(t + s, 0, x))."""
    f = lambda z: stable_kernel(alpha, t, z) * stable_kernel(alpha, s, x - z)
    pts = sorted({0.0, x})
    left, _ = integrate.quad(f, -np.inf, pts[0], limit=400, epsabs=1e-13, epsrel=1e-12)
    middle = 0.0
    if len(pts) > 1:
        middle, _ = integrate.quad(f, pts[0], pts[1], limit=400, epsabs=1e-13, epsrel=1e-12)
    right, _ = integrate.quad(f, pts[-1], np.inf, limit=400, epsabs=1e-13, epsrel=1e-12)
    return left + middle + right, stable_kernel(alpha, t + s, x)


def total_mass(alpha: float, t: float) -> float:
    """2 int_0^inf p(t, 0, x) dx, integrated in log x with an analytic far tail."""
    scale = t ** (1.0 / alpha)
    cut = 1e-8 * scale
    head = 2.0 * cut * stable_kernel(alpha, t, 0.0)
    big = 1e8 * scale if alpha < 2 else 60.0 * scale
    body, _ = integrate.quad(
        lambda u: stable_kernel(alpha, t, math.exp(u)) * math.exp(u), math.log(cut), math.log(big), limit=800, epsabs=1e-14, epsrel=1e-12
    )
    tail = 0.0
    if alpha < 2:
        c = special.gamma(1.0 + alpha) * math.sin(math.pi * alpha / 2.0) / math.pi
        tail = c * t * big ** (-alpha) / alpha
    return head + 2.0 * (body + tail)
