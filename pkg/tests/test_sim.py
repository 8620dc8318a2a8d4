import numpy as np
import pytest

from mecaoi.models import EquitableRates, PrimaryRates, SecondaryRates, equitable_aoi, primary_aoi, secondary_aoi
from mecaoi.sim import DegenerateEstimateError, NetworkSpec, busy_fraction_check, horizon_for, simulate

EQ = EquitableRates(10, .5, 1, .8, 15, 5)


def test_simulation_is_deterministic_given_seed():
    spec = NetworkSpec("equitable-faithful", [EQ], 5e3, seed=7)
    assert simulate(spec) == simulate(spec)
    other = simulate(NetworkSpec("equitable-faithful", [EQ], 5e3, seed=8))
    assert other.aoi != simulate(spec).aoi


def test_spec_validation():
    with pytest.raises(ValueError):
        NetworkSpec("ring", [EQ], 1e3)
    with pytest.raises(ValueError):
        NetworkSpec("equitable-full", [EQ], 0.0)
    with pytest.raises(ValueError):
        NetworkSpec("equitable-full", [PrimaryRates(1, .5, 1, 1, 1)], 1e3)
    with pytest.raises(ValueError):
        NetworkSpec("priority-full", [SecondaryRates(1, .5, 1, 1, 1)], 1e3)
    with pytest.raises(ValueError):
        NetworkSpec("equitable-full", [EQ, EquitableRates(1, .5, 1, 1, 3)], 1e3)


def test_no_deliveries_is_degenerate():
    starved = EquitableRates(1e-4, .5, 1, 1, 1)
    with pytest.raises(DegenerateEstimateError):
        simulate(NetworkSpec("equitable-faithful", [starved], 10.0, seed=1))


def test_equitable_faithful_matches_analytic():
    est = simulate(NetworkSpec("equitable-faithful", [EQ], 1e5, seed=3))
    assert abs(est.aoi[0] - equitable_aoi(EQ)) <= est.ci3sigma[0]


def test_primary_and_exact_secondary_match_analytic():
    prim = PrimaryRates(2, .4, 1.5, .8, 6)
    sec = SecondaryRates(1.5, .3, 1.0, 2.0, 6, 0.5, 0.8)
    est = simulate(NetworkSpec("priority-faithful", [prim, sec], 1e5, seed=4, lambda_s=1.0))
    assert abs(est.aoi[0] - primary_aoi(prim)) <= est.ci3sigma[0]
    assert abs(est.aoi[1] - secondary_aoi(sec, "exact")) <= est.ci3sigma[1]


@pytest.mark.parametrize("spec", [
    NetworkSpec("equitable-full", [EQ, EquitableRates(3, .2, 2, 1, 15)], 4e4, seed=5),
    NetworkSpec("priority-full", [PrimaryRates(2, .5, 1, .5, 15)] + [SecondaryRates(1, .5, 1, 1, 15)] * 3, 4e4, seed=6),
    NetworkSpec("priority-faithful", [PrimaryRates(2, .5, 1, .5, 15), SecondaryRates(1, .3, 1, 2, 15, .5, 1)],
                4e4, seed=7, lambda_s=2.0),
])
def test_busy_fractions_match_closed_forms(spec):
    for row in busy_fraction_check(spec):
        assert abs(row.simulated - row.analytic) <= max(row.ci3sigma, 1e-3), row


def test_horizon_for_reaches_target():
    spec = NetworkSpec("equitable-faithful", [EQ], 1.0, seed=2)
    h = horizon_for(spec, 20000)
    est = simulate(NetworkSpec("equitable-faithful", [EQ], h, seed=2))
    assert min(est.deliveries) >= 0.9 * 20000
    assert np.isfinite(h)
