import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from haudim.paths import SamplePath
from haudim.scaling import PowerScale
from haudim.timeset import (
    Cantor,
    InsufficientScalesError,
    IntervalUnion,
    Point,
    SubResolutionError,
    TimeSetHits,
    dyadic_ladder,
    estimate_dimension,
    extract_hits,
    fit_slope,
)


@given(a=st.floats(1.0, 3.0), c=st.floats(0.1, 10))
def test_fit_slope_exact_power_law(a, c):
    d = np.geomspace(1e-4, 1e-1, 8)
    slope, se = fit_slope(d, c * d**-a)
    assert slope == pytest.approx(a, rel=1e-9) and se < 1e-6


def test_cantor_geometry():
    k = Cantor(1 / 3, 4)
    lows = k.interval_lows()
    assert len(lows) == 16 and k.piece_length == pytest.approx(3**-4)
    assert k.distance(np.array([0.0, 0.5, 1.0])) == pytest.approx([0.0, 1 / 6, 0.0])
    assert k.nominal_dim == pytest.approx(math.log(2) / math.log(3))


def test_interval_union_distance():
    u = IntervalUnion(((0, 1), (2, 3)))
    assert u.distance(np.array([-1, 0.5, 1.5, 4])) == pytest.approx([1, 0, 0.5, 1])
    assert u.nominal_dim == 1


def test_full_time_set_has_dimension_one():
    n = 2**14
    path = SamplePath(1 / n, np.zeros(n + 1))
    hits = extract_hits(path, Point(0.0), PowerScale.pure(2.0), dyadic_ladder(1 / n, 1.0))
    est = estimate_dimension(hits)
    assert est.slope == pytest.approx(1.0, abs=1e-9)


def test_single_hit_is_empty():
    n = 2**14
    states = np.ones(n + 1)
    states[100] = 0.0
    hits = extract_hits(SamplePath(1 / n, states), Point(0.0), PowerScale.pure(2.0), dyadic_ladder(1 / n, 1.0))
    assert estimate_dimension(hits).empty


def test_resolution_errors():
    path = SamplePath(0.01, np.zeros(101))
    with pytest.raises(SubResolutionError):
        extract_hits(path, Point(0.0), PowerScale.pure(2.0), [0.001])
    hits = extract_hits(path, Point(0.0), PowerScale.pure(2.0), dyadic_ladder(0.01, 1.0))
    with pytest.raises(InsufficientScalesError):
        estimate_dimension(hits)


def test_merge_is_union():
    a = TimeSetHits(1.0, 0.1, {0.1: np.array([1, 3])})
    b = TimeSetHits(1.0, 0.1, {0.1: np.array([3, 5])})
    assert a.merge(b).counts() == [3]
