import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haudim.scaling import (
    Bound,
    DomainError,
    Integral,
    MissingBoundError,
    PowerScale,
    ProcessClass,
    ProcessKind,
    ProfileMismatchError,
    collision_curve,
    collision_gamma,
    collision_s0,
    gamma_closed_form,
    gamma_curve,
    gamma_numeric,
    point_capacity_positive,
    predict_collision_dim,
    predict_inverse_dim,
    predict_level_dim,
    product_J,
    recurrence_I,
)

exps = st.floats(0.3, 2.5)
dims = st.floats(0.5, 3.0)


@given(d=dims, a=exps, s=st.floats(0, 4))
@settings(max_examples=40, deadline=None)
def test_gamma_numeric_matches_closed_form(d, a, s):
    p = ProcessClass.from_exponents(d, a, d + 0.5, a + 0.1)
    assert abs(gamma_numeric(p.volume, p.scale, s) - gamma_closed_form(p, s)) <= 1e-6


@given(a=st.floats(0.5, 3.0))
def test_scale_inverse_roundtrip(a):
    sc = PowerScale(a, a + 0.5)
    r = np.geomspace(1e-3, 1e3, 13)
    assert np.allclose(sc.inverse(sc(r)), r, rtol=1e-12)


def test_scale_power_multiplies_exponents():
    sc = PowerScale(2.0, 1.5).power(0.5)
    assert (sc.alpha_local, sc.alpha_global) == (1.0, 0.75)


def test_gamma_curve_shape():
    c = gamma_curve(ProcessClass.brownian())
    assert c(0) == 0.5 and c.s0 == 1.0 and c(2.0) == 0.0
    with pytest.raises(DomainError):
        c(-0.1)


def test_collision_formula_exact():
    p1, p2 = ProcessClass.stable(1.2), ProcessClass.brownian()
    for s in np.linspace(0, 1, 11):
        assert collision_gamma(p1, p2, s) == max((1 - s) / 1.2 + 1 / 2, 0.0)
    assert collision_curve(p1, p2).s0 == pytest.approx(collision_s0(p1, p2))


def test_collision_requires_shared_space():
    with pytest.raises(ProfileMismatchError):
        collision_gamma(ProcessClass.stable(1.5, 1.0), ProcessClass.stable(1.5, 2.0), 0.0)


def test_diffusion_needs_walk_dimension_two():
    with pytest.raises(DomainError):
        ProcessClass.from_exponents(1, 1.5, kind=ProcessKind.DIFFUSION)


@pytest.mark.parametrize("alpha,expected", [(2.0, 0.5), (1.5, 1 / 3), (1.0, 0.0)])
def test_level_dim_values(alpha, expected):
    pred = predict_level_dim(ProcessClass.stable(alpha))
    assert pred.value == pytest.approx(expected) and pred.certified


def test_level_dim_empty_below_one():
    assert predict_level_dim(ProcessClass.stable(0.8)).empty


def test_level_dim_needs_odhk():
    p = ProcessClass.from_exponents(1, 2, kind="diffusion", bounds=[Bound.NDLHK])
    with pytest.raises(MissingBoundError):
        predict_level_dim(p)


def test_inverse_dim_cantor():
    s_F = math.log(2) / math.log(3)
    pred = predict_inverse_dim(ProcessClass.brownian(), s_F)
    assert pred.value == pytest.approx(1 - (1 - s_F) / 2)
    with pytest.raises(DomainError):
        predict_inverse_dim(ProcessClass.brownian(), 1.5)


def test_collision_predictions():
    bm = ProcessClass.brownian()
    assert predict_collision_dim(bm, bm, 1, 1).value == pytest.approx(0.5)
    mixed = predict_collision_dim(ProcessClass.stable(1.2), bm, 1, 1)
    assert mixed.value == pytest.approx(0.5) and mixed.certified


def test_integral_tests():
    bm = ProcessClass.brownian()
    assert recurrence_I(bm, 1.0) is Integral.INFINITE
    assert recurrence_I(ProcessClass.stable(0.8), 1.0) is Integral.FINITE
    assert product_J(bm, bm, 1.0) is Integral.INFINITE
    assert product_J(ProcessClass.stable(1.2), ProcessClass.stable(1.2), 1.0) is Integral.FINITE
    assert point_capacity_positive(bm) and not point_capacity_positive(ProcessClass.stable(0.9))
