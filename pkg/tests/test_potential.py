import math

import numpy as np
import pytest

from haudim import potential as P
from haudim.scaling import DomainError, PowerScale


def test_cantor_measure_basics():
    nu = P.cantor_measure(1 / 3, 6)
    assert nu.total_mass == pytest.approx(1.0) and len(nu) == 64
    assert nu.ball_mass(0.0, 1 / 3) == pytest.approx(0.5)


@pytest.mark.parametrize("ratio", [0.25, 1 / 3, 0.4])
def test_spectrum_matches_brute_force(ratio):
    nu = P.cantor_measure(ratio, 7)
    plain = P.DiscreteMeasure(nu.points, nu.masses)
    s = np.array([0.2, 0.5, 0.9])
    assert P.pair_energy(nu, s) == pytest.approx(P.pair_energy(plain, s), rel=1e-10)


def test_measure_validation():
    with pytest.raises(DomainError):
        P.DiscreteMeasure(np.array([0.0, 0.0]), np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        P.pair_energy(P.cantor_measure(1 / 3, 3), 0.0)


def test_verdicts_either_side_of_dimension():
    nu = P.cantor_measure(1 / 3, 12)
    levels = range(6, 13)
    assert P.frostman_verdict(P.energy_integral(nu, 0.4, levels)) is P.Verdict.FINITE
    assert P.frostman_verdict(P.energy_integral(nu, 0.8, levels)) is P.Verdict.DIVERGENT


def test_bracket_flip_near_dimension():
    br = P.frostman_bracket()
    assert br.last_finite < br.flip
    assert abs(br.flip - math.log(2) / math.log(3)) <= 0.05
    assert br.csv().startswith("s,verdict\n")


def test_wilson_interval():
    est = P.wilson(30, 100)
    assert est.p_hat == 0.3 and est.ci_low < 0.3 < est.ci_high


def test_mc_hitting_needs_trials():
    with pytest.raises(ValueError):
        P.mc_hitting(lambda s: None, P.WholeSpace(), trials=10, seed=0)


def test_annuli_separation_and_shells():
    bm = PowerScale.pure(2.0)
    with pytest.raises(P.SeparationError) as err:
        P.build_annuli((0, 0), 3.0, (bm, bm))
    assert err.value.minimum == pytest.approx(4.0)
    fam = P.build_annuli((0, 0), 4.0, (bm, bm))
    y = math.sqrt(4.0**3 * 1.5)
    assert fam.shell_index(y, 0.0) == 3 and fam.contains(3, y, 0.0)


def test_wiener_verdicts_match_analytic():
    for cfg in (P.brownian_diagonal_config(trials=200, seed=1), P.transient_pair_config(trials=400, seed=1)):
        rep = P.wiener_experiment(cfg)
        assert rep.agrees
        assert rep.csv().startswith("n,p_hat,ci_low,ci_high,partial_sum\n")
