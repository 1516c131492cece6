import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haudim import kernels as K
from haudim.scaling import ProcessClass


def cauchy(t, x):
    return t / (math.pi * (t * t + x * x))


def gauss(t, x):
    return math.exp(-x * x / (4 * t)) / math.sqrt(4 * math.pi * t)


@given(t=st.floats(0.01, 100), x=st.floats(0, 50))
@settings(max_examples=50, deadline=None)
def test_closed_forms(t, x):
    assert K.stable_kernel(2.0, t, x) == pytest.approx(gauss(t, x), rel=1e-12, abs=1e-300)
    assert K.stable_kernel(1.0, t, x) == pytest.approx(cauchy(t, x), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.6, 0.97, 1.3, 1.8, 1.999])
def test_routes_agree(alpha):
    for x in (0.0, 0.01, 0.7, 3.0, 20.0):
        z = K.stable_kernel(alpha, 1.0, x)
        assert K.fourier_kernel(alpha, 1.0, x) == pytest.approx(z, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.7, 1.5])
def test_origin_value(alpha):
    assert K.stable_kernel(alpha, 2.0, 0.0) == pytest.approx(math.gamma(1 + 1 / alpha) / (math.pi * 2.0 ** (1 / alpha)))


@pytest.mark.parametrize("alpha", [0.8, 1.5, 2.0])
def test_mass_and_semigroup(alpha):
    assert K.total_mass(alpha, 0.7) == pytest.approx(1.0, abs=1e-6)
    lhs, rhs = K.chapman_kolmogorov(alpha, 0.4, 0.9, 0.5)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_cdf_symmetry():
    assert K.stable_cdf(1.3, 1.0, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert K.stable_cdf(1.3, 1.0, 2.0) + K.stable_cdf(1.3, 1.0, -2.0) == pytest.approx(1.0, abs=1e-9)


def test_subordination_identity():
    for t in (0.1, 1.0, 10.0):
        for x in (0.0, 1.0, 5.0):
            assert K.subordinated_kernel(2.0, 0.5, t, x) == pytest.approx(cauchy(t, x), rel=1e-6)
            assert K.subordinated_kernel(2.0, 0.75, t, x) == pytest.approx(K.stable_kernel(1.5, t, x), rel=1e-6)


def test_subordinated_monte_carlo():
    q = K.subordinated_kernel(1.0, 0.3, 1.0, 0.5)
    mc, err = K.subordinated_kernel(1.0, 0.3, 1.0, 0.5, method="monte_carlo", n=200_000, seed=1, return_error=True)
    assert abs(mc - q) < 4 * err


def test_bound_reports_flat():
    grid = K.KernelGrid.stable(1.5)
    for rep in (K.check_wuhk(1.5, grid), K.check_ndlhk(1.5, grid)):
        assert abs(rep.trend_slope) < 0.1 and 0 < rep.ratio_min <= rep.ratio_max


def test_resolvent_positive_decreasing():
    r = [K.resolvent(1.6, 0.75, 1.0, x) for x in (0.1, 1.0, 10.0)]
    assert r[0] > r[1] > r[2] > 0


def test_recurrent_green_diverges():
    with pytest.raises(K.DivergentGreenError):
        K.green_product(ProcessClass.brownian(), ProcessClass.brownian(), 1.0, (0.0, 0.0), (1.0, 1.0))


def test_transient_green_symmetric():
    p = ProcessClass.stable(1.2)
    a = K.green_product(p, p, 1.0, (0.0, 0.0), (0.3, -0.7))
    b = K.green_product(p, p, 1.0, (0.3, -0.7), (0.0, 0.0))
    assert 0 < a < float("inf") and a == pytest.approx(b, rel=1e-10)
