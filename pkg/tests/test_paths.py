import numpy as np
import pytest
from scipy import stats

from haudim.paths import (
    PathSpec,
    dump_path,
    load_path,
    product_path,
    sample_stable_path,
    stable_increments,
    subordinate_path,
    symmetric_stable_unit,
)
from haudim.scaling import DomainError
from haudim.seeds import generator


@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5, 2.0])
def test_unit_characteristic_function(alpha):
    x = symmetric_stable_unit(generator(1), alpha, 200_000)
    for xi in (0.5, 1.0, 2.0):
        emp = np.cos(xi * x).mean()
        assert abs(emp - np.exp(-abs(xi) ** alpha)) < 5 * 0.71 / np.sqrt(x.size)


def test_brownian_variance_convention():
    x = stable_increments(2.0, np.full(100_000, 0.25), 3)
    assert np.var(x) == pytest.approx(0.5, rel=0.02)


def test_path_shape_and_reproducibility():
    spec = PathSpec(1.5, 2.0, 1000, 0.3)
    a, b = sample_stable_path(spec, 7), sample_stable_path(spec, 7)
    assert a.states[0] == 0.3 and a.n_steps == 1000 and a.T == pytest.approx(2.0)
    assert np.array_equal(a.states, b.states)
    assert not np.array_equal(a.states, sample_stable_path(spec, 8).states)


def test_subordinated_marginal_is_stable():
    # B at an independent 1/2-stable clock is Cauchy with scale 1 at t = 1
    ends = [subordinate_path(PathSpec(2.0, 1.0, 4), 0.5, s).states[-1] for s in range(4000)]
    assert stats.kstest(ends, stats.cauchy.cdf).pvalue > 1e-3


def test_product_path_components_share_grid():
    pp = product_path(PathSpec(2.0, 1.0, 500), PathSpec(1.2, 1.0, 500), 1, gamma=0.7)
    assert pp.n_steps == 500 and pp.first.dt == pp.second.dt
    with pytest.raises(ValueError):
        product_path(PathSpec(2.0, 1.0, 500), PathSpec(2.0, 1.0, 400), 1)


def test_dump_roundtrip(tmp_path):
    p = sample_stable_path(PathSpec(1.2, 1.0, 100), 5)
    dump_path(p, tmp_path / "p.bin")
    q = load_path(tmp_path / "p.bin")
    assert np.array_equal(p.states, q.states) and (q.dt, q.alpha, q.seed) == (p.dt, p.alpha, p.seed)


def test_bad_specs():
    with pytest.raises(DomainError):
        PathSpec(2.5)
    with pytest.raises(DomainError):
        subordinate_path(PathSpec(2.0), 1.5, 0)
