import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from mecaoi.models import (
    EQUITABLE, EQUITABLE_TABLE, PRIMARY_TABLE, SECONDARY_TABLE, ClosedFormSingularity,
    EquitableRates, PrimaryRates, SecondaryRates, build_equitable_model, build_primary_model,
    build_secondary_model, equitable_aoi, exogenous_rate, primary_aoi, primary_aoi_any,
    primary_aoi_closed_form, secondary_aoi, state_mass,
)
from mecaoi.shs import (
    ShsModel, SingularModelError, Transition, average_aoi, recurrent_class, solve_correlation,
    solve_steady_state,
)

rate = st.floats(0.1, 20.0)
prob = st.floats(0.0, 1.0)


# ------------------------------------------------------------- ShsModel

def test_model_rejects_bad_structure():
    with pytest.raises(ValueError):
        ShsModel(1, ["a"], [[1, 1]], [Transition(0, -1.0, 0, (0, 1))])
    with pytest.raises(ValueError):
        ShsModel(1, ["a"], [[1, 1]], [Transition(0, 1.0, 3, (0, 1))])
    with pytest.raises(ValueError):
        ShsModel(1, ["a"], [[1, 1]], [Transition(0, 1.0, 0, (0, 5))])


def test_single_server_lcfs_preemptive_age():
    # one preemptive server fed at rate lam: age 1/lam + 1/mu
    lam, mu = 2.0, 1.0
    model = ShsModel(1, ["busy"], [[1, 1]], [
        Transition(0, lam, 0, (0, None)),
        Transition(0, mu, 0, (1, 1)),
    ])
    assert average_aoi(model) == pytest.approx(1 / lam + 1 / mu, rel=1e-12)


def test_never_reset_age_is_singular():
    model = ShsModel(1, ["a"], [[1, 1]], [Transition(0, 1.0, 0, (0, None))])
    with pytest.raises(SingularModelError):
        average_aoi(model)


def test_recurrent_class_prunes_transient_states():
    # 0 -> 1 <-> 2: state 0 is transient
    live = recurrent_class(3, np.array([0, 1, 2]), np.array([1, 2, 1]), np.array([1.0, 1.0, 1.0]))
    assert list(np.flatnonzero(live)) == [1, 2]


# --------------------------------------------------------------- tables

def test_table_row_counts():
    assert len(EQUITABLE_TABLE) == 45
    assert len(PRIMARY_TABLE) == 23
    assert len(SECONDARY_TABLE) == 70
    assert build_secondary_model(SecondaryRates(1, .5, 1, 1, 1, 1, 1)).n_states == 10


def _balance_from_table(table, n, symbols, pis):
    eqs = []
    for i in range(n):
        out = sum(symbols[lab] for s, lab, d, _ in table if s == i) * pis[i]
        inflow = sum(symbols[lab] * pis[s] for s, lab, d, _ in table if d == i)
        eqs.append(sp.expand(out - inflow))
    return eqs


def test_equitable_balance_equations_match_printed_set():
    lam, p, le, m1, m2, m3 = sp.symbols("lambda p lambda_e mu_1 mu_2 mu_3", positive=True)
    q = 1 - p
    sym = {"lp": lam * p, "lq": lam * q, "le": le, "mu1": m1, "mu2": m2, "mu3": m3}
    pi = sp.symbols("pi1:9")
    a = lam + le + m1 + m2 + m3
    ah = a - m1
    # net-flow form (lhs - rhs) of the printed balance set for states 1..7;
    # the eighth printed equation carries a typo and is not used
    printed = [
        a * pi[0] - ((lam * q + m2 + m3) * pi[0] + lam * q * (pi[2] + pi[3])),
        a * pi[1] - ((lam * q + m2 + m3) * pi[1] + lam * q * pi[4]),
        a * pi[2] - ((lam * p + m2 + m3) * pi[2] + lam * p * (pi[0] + pi[1])),
        ah * pi[3] - ((lam * p + m2 + m3) * pi[3] + lam * p * pi[4] + m1 * (pi[2] + pi[7])),
        ah * pi[4] - ((m2 + m3) * pi[4] + m1 * (pi[0] + pi[1] + pi[6])),
        ah * pi[5] - ((lam * p + le + m2 + m3) * pi[5] + le * (pi[3] + pi[4])),
        a * pi[6] - ((lam * q + le + m2 + m3) * pi[6] + le * (pi[0] + pi[1]) + lam * q * (pi[5] + pi[7])),
    ]
    generated = _balance_from_table(EQUITABLE_TABLE, 8, sym, pi)
    for k in range(7):
        assert sp.simplify(generated[k] - sp.expand(printed[k])) == 0, f"state {k + 1}"


# ------------------------------------------------------------- solvers

@settings(max_examples=60, deadline=None)
@given(lam=rate, p=prob, m1=rate, m2=rate, m3=rate, le=st.floats(0.0, 20.0))
def test_steady_state_is_on_the_simplex(lam, p, m1, m2, m3, le):
    pi = state_mass(build_equitable_model(EquitableRates(lam, p, m1, m2, m3, le)))
    assert np.all(pi >= 0)
    assert abs(pi.sum() - 1.0) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(lam=rate, p=prob, m1=rate, m2=rate, m3=rate, le=st.floats(0.0, 20.0), c=st.floats(0.1, 10.0))
def test_age_scales_inversely_with_all_rates(lam, p, m1, m2, m3, le, c):
    base = equitable_aoi(EquitableRates(lam, p, m1, m2, m3, le))
    scaled = equitable_aoi(EquitableRates(c * lam, p, c * m1, c * m2, c * m3, c * le))
    assert scaled == pytest.approx(base / c, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(lam=rate, p=prob, m1=rate, m2=rate, m3=rate, le=st.floats(0.0, 20.0))
def test_fast_path_matches_generic_solver(lam, p, m1, m2, m3, le):
    r = EquitableRates(lam, p, m1, m2, m3, le)
    assert equitable_aoi(r) == pytest.approx(average_aoi(build_equitable_model(r)), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(lam=rate, p=prob, m1=rate, m2=rate, m3=rate, le=st.floats(0.0, 20.0))
def test_age_positive_and_correlations_nonnegative(lam, p, m1, m2, m3, le):
    model = build_equitable_model(EquitableRates(lam, p, m1, m2, m3, le))
    v = solve_correlation(model, solve_steady_state(model)).v
    assert np.all(v >= -1e-12)
    assert v[:, 0].sum() > 0


# ----------------------------------------------------------- oracles

@settings(max_examples=40, deadline=None)
@given(lam=rate, m1=rate, m2=rate, m3=rate)
def test_pure_offloading_is_a_line_of_preemptive_servers(lam, m1, m2, m3):
    # a tandem of memoryless preemptive servers has age 1/lam + sum 1/mu
    expect = 1 / lam + 1 / m1 + 1 / m3
    assert equitable_aoi(EquitableRates(lam, 0.0, m1, m2, m3, 0.0)) == pytest.approx(expect, rel=1e-9)
    assert primary_aoi(PrimaryRates(lam, 0.0, m1, m2, m3)) == pytest.approx(expect, rel=1e-9)
    assert secondary_aoi(SecondaryRates(lam, 0.0, m2, m1, m3), "exact") == pytest.approx(expect, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(lam=rate, m1=rate, m2=rate, m3=rate, le=st.floats(0.0, 20.0))
def test_pure_local_processing_is_one_preemptive_server(lam, m1, m2, m3, le):
    expect = 1 / lam + 1 / m2
    assert equitable_aoi(EquitableRates(lam, 1.0, m1, m2, m3, le)) == pytest.approx(expect, rel=1e-9)
    assert primary_aoi(PrimaryRates(lam, 1.0, m1, m2, m3)) == pytest.approx(expect, rel=1e-9)


def test_frozen_equitable_value():
    # cross-checked against a 1e6-delivery simulation (z = 1.0)
    assert equitable_aoi(EquitableRates(10, .5, 1, .8, 15, 5)) == pytest.approx(0.8688503968669453, rel=1e-12)


def test_exogenous_traffic_never_helps():
    base = EquitableRates(3, .3, 2, 1, 4, 0)
    ages = [equitable_aoi(EquitableRates(3, .3, 2, 1, 4, le)) for le in (0, 1, 5, 25, 125)]
    assert ages[0] == equitable_aoi(base)
    assert all(a <= b + 1e-12 for a, b in zip(ages, ages[1:]))


def test_saturating_arrivals_give_finite_limit():
    ages = [equitable_aoi(EquitableRates(lam, .5, 1, .8, 15, 5)) for lam in (1e2, 1e3, 1e4, 1e5)]
    assert np.all(np.isfinite(ages))
    assert abs(ages[-1] - ages[-2]) < abs(ages[1] - ages[0])


# ---------------------------------------------------------- primary

@settings(max_examples=100, deadline=None)
@given(lam=rate, p=st.floats(0.01, 0.99), m1=rate, m2=rate, m3=rate)
def test_primary_closed_form_matches_linear_system(lam, p, m1, m2, m3):
    r = PrimaryRates(lam, p, m1, m2, m3)
    if abs(m1 - m3) <= 1e-3:
        return
    assert primary_aoi_closed_form(r) == pytest.approx(primary_aoi(r), rel=1e-8)


def test_primary_closed_form_singularity_is_reported():
    r = PrimaryRates(2, .5, 3.0, 1, 3.0)
    with pytest.raises(ClosedFormSingularity):
        primary_aoi_closed_form(r)
    assert primary_aoi_any(r) == pytest.approx(primary_aoi(r))


def test_primary_ignores_secondary_load():
    r = PrimaryRates(2, .5, 1, .5, 15)
    a = average_aoi(build_primary_model(r, lambda_s=0.0))
    b = average_aoi(build_primary_model(r, lambda_s=50.0))
    assert a == b


# --------------------------------------------------------- secondary

def test_printed_secondary_table_is_inexact_without_exogenous_traffic():
    # with no other secondaries and no class-P traffic the secondary user
    # is the equitable device with lambda_e = 0
    args = (2, .3, 1, 3, 5)
    reference = equitable_aoi(EquitableRates(2, .3, 3, 1, 5, 0))
    exact = secondary_aoi(SecondaryRates(*args), "exact")
    printed = secondary_aoi(SecondaryRates(*args), "printed")
    assert exact == pytest.approx(reference, rel=1e-12)
    assert abs(printed - reference) / reference > 0.05


def test_secondary_variant_is_validated():
    with pytest.raises(ValueError):
        secondary_aoi(SecondaryRates(1, .5, 1, 1, 1), "other")


def test_class_p_traffic_hurts_secondary():
    ages = [secondary_aoi(SecondaryRates(2, .3, 1, 3, 5, 1, lp), "exact") for lp in (0, 0.5, 2, 8)]
    assert all(a < b for a, b in zip(ages, ages[1:]))


# ----------------------------------------------------------- helpers

def test_exogenous_rate_sums_departure_rates_of_others():
    others = [(10, .5, 1), (3, .3, 2)]
    expect = 5 * 1 / 6 + 2.1 * 2 / 4.1
    assert exogenous_rate(others) == pytest.approx(expect)
    assert exogenous_rate([(1, 1.0, 1)]) == 0.0


def test_rates_validate():
    with pytest.raises(ValueError):
        EquitableRates(1, 1.5, 1, 1, 1)
    with pytest.raises(ValueError):
        EquitableRates(-1, .5, 1, 1, 1)
    with pytest.raises(ValueError):
        PrimaryRates(1, .5, 0, 1, 1)


def test_template_row_count():
    assert len(EQUITABLE) == 45
