"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line through the ``verdict`` fixture; the
lines are repeated in the terminal summary. Runtimes are asserted too.
"""

import time

import numpy as np

from mecaoi.costs import cost_mf_equitable
from mecaoi.experiments import preset, run, validation_rows
from mecaoi.game import DevicePolicy, PrimaryProfile, SolverConfig, TypeProfile
from mecaoi.models import (
    EquitableRates, PrimaryRates, build_equitable_model, equitable_aoi, primary_aoi, primary_aoi_closed_form,
    state_mass,
)
from mecaoi.optim import block_descent
from mecaoi.results import ResultTable
from mecaoi.sim import NetworkSpec, simulate
from mecaoi.solvers import mfe_residual, mfe_solve, mm_mfe_solve, nash_solve

from oracles import grid_search


def _nonincreasing(xs, tol=0.0):
    return all(b <= a + tol for a, b in zip(xs, xs[1:]))


def _nondecreasing(xs, tol=0.0):
    return all(b >= a - tol for a, b in zip(xs, xs[1:]))


def test_criterion_1_closed_form_equivalence(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, n = 0.0, 0
    while n < 1000:
        lam, m1, m2, m3 = np.exp(rng.uniform(np.log(0.1), np.log(20), 4))
        if abs(m1 - m3) <= 1e-3:
            continue
        r = PrimaryRates(lam, rng.uniform(0, 1), m1, m2, m3)
        worst = max(worst, abs(primary_aoi_closed_form(r) / primary_aoi(r) - 1))
        n += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 5
    verdict(1, ok, f"worst relative gap {worst:.2e} over 1000 points (tol 1e-8), {dt:.2f} s")
    assert ok


def test_criterion_2_simulation_matches_analytic(verdict):
    t0 = time.perf_counter()
    rows = list(validation_rows(1_000_000, seed=0))
    dt = time.perf_counter() - t0
    zs = {m: [r["z"] for r in rows if r["model"] == m] for m in ("equitable", "primary", "secondary")}
    enough = min(r["deliveries"] for r in rows) >= 1_000_000
    ok = all(abs(z) <= 3 for v in zs.values() for z in v) and enough and dt < 120
    detail = ", ".join(f"{m} max|z|={max(abs(z) for z in v):.2f}" for m, v in zs.items())
    verdict(2, ok, f"{detail}; min deliveries {min(r['deliveries'] for r in rows)}, {dt:.0f} s")
    printed = [r["z_printed"] for r in rows if r["model"] == "secondary"]
    bad = sum(abs(z) > 3 for z in printed)
    verdict("2-info", True, f"printed 10-state secondary table: {bad}/5 points outside 3 sigma "
                            f"(z = {', '.join(f'{z:.1f}' for z in printed)}); criterion uses the exact chain")
    assert ok


def test_criterion_3_single_server_oracle(verdict):
    t0 = time.perf_counter()
    got = equitable_aoi(EquitableRates(2.0, 1.0, 1e-9, 1.0, 15.0))
    want = 1 / 2 + 1 / 1
    dt = time.perf_counter() - t0
    rel = abs(got / want - 1)
    ok = rel <= 1e-3 and dt < 1
    verdict(3, ok, f"Delta={got:.9f} vs {want} (rel {rel:.1e}, tol 1e-3), {dt * 1e3:.1f} ms")
    assert ok


def test_criterion_4_local_probability_rises_with_load(verdict):
    t0 = time.perf_counter()
    cfg = preset("fig7")
    table, status = run(cfg)
    rhos, ps = table.column("rho"), table.column("p")
    t = TypeProfile("a", 1.0, **{k: cfg["types"][0][k] for k in ("lam", "V", "eta", "P_max", "f_max")})
    N, mu3 = cfg["system"]["N"], cfg["system"]["mu3"]
    gaps = []
    for rho, p in zip(rhos, ps):
        f = lambda x, rho=rho: cost_mf_equitable(DevicePolicy.from_vector(x), t, rho, N, mu3)
        x, _ = grid_search(f, *t.bounds(), steps=(0.05, 0.01))
        gaps.append(abs(x[0] - p))
    dt = time.perf_counter() - t0
    mono = _nondecreasing(ps)
    ok = mono and max(gaps) <= 0.02 and status == 0 and dt < 120
    verdict(4, ok, f"p-hat {ps[0]:.3f} -> {ps[-1]:.3f}, non-decreasing={mono}, "
                   f"max |p - grid| {max(gaps):.4f} (tol 0.02), {dt:.0f} s")
    assert ok


def test_criterion_5_power_aoi_tradeoff(verdict):
    t0 = time.perf_counter()
    table, status = run(preset("fig9"))
    dt = time.perf_counter() - t0
    V = table.column("V")
    power, aoi = table.column("power"), table.column("aoi")
    # ordered by increasing 1/V
    order = np.argsort([1 / v for v in V])
    pw, ag = [power[i] for i in order], [aoi[i] for i in order]
    p_mono = _nonincreasing(pw, 1e-9)
    a_mono = _nondecreasing(ag, 1e-9)
    limit = pw[0]
    near = abs(limit - 0.455) <= 0.02
    ok = p_mono and a_mono and near and status == 0 and dt < 600
    verdict(5, ok, f"power non-increasing in 1/V={p_mono}, power at V={V[order[0]]:g} is {limit:.4f} "
                   f"(target 0.455 +- 0.02), AoI non-decreasing in 1/V={a_mono} "
                   f"(AoI {min(ag):.4f}..{max(ag):.4f}), converged={status == 0}, {dt:.0f} s")
    assert ok


def test_criterion_6_utilization_gain(verdict):
    t0 = time.perf_counter()
    table, status = run(preset("utilization"))
    dt = time.perf_counter() - t0
    rec = table.records()[0]
    solo, tp, gain = rec["solo_t_TP1"], rec["t_TP"], rec["utilization_gain"]
    ok = abs(solo - 0.6248) <= 0.05 and abs(tp - 0.9896) <= 0.05 and gain >= 0.30 and dt < 600
    verdict(6, ok, f"solo t_TP1={solo:.4f} (target 0.6248 +- 0.05), t_TP={tp:.4f} "
                   f"(target 0.9896 +- 0.05), gain={gain:.1%} (need >= 30%), "
                   f"secondary p={rec['S_p']:.3f}, converged={status == 0}, {dt:.0f} s")
    assert ok


def test_criterion_7_price_responses(verdict):
    t0 = time.perf_counter()
    table, status = run(preset("fig10"))
    dt = time.perf_counter() - t0
    eps1 = SolverConfig().eps1
    jp, ps, m2, rho = (table.column(c) for c in ("P_cost", "S_p", "S_mu2", "rho"))
    checks = {
        "J_P non-increasing": _nonincreasing(jp, eps1),
        "p non-decreasing": _nondecreasing(ps, eps1),
        "mu2 non-decreasing": _nondecreasing(m2, eps1),
        "rho non-increasing": _nonincreasing(rho, eps1),
    }
    ok = all(checks.values()) and status == 0 and dt < 900
    verdict(7, ok, f"{checks}; J_P {jp[0]:.4f} -> {jp[-1]:.4f}, rho {rho[0]:.2e} -> {rho[-1]:.2e}, "
                   f"converged={status == 0}, {dt:.0f} s")
    assert ok


def test_criterion_8_nash_close_to_mean_field(verdict):
    t0 = time.perf_counter()
    table, status = run(preset("table9"))
    dt = time.perf_counter() - t0
    gaps = dict(zip(table.column("N"), table.column("rel_gap")))
    ok = all(g <= 0.20 for g in gaps.values()) and status == 0 and dt < 1200
    verdict(8, ok, f"relative gaps {', '.join(f'N={n}: {g:.2e}' for n, g in gaps.items())} "
                   f"(tol 0.20), converged={status == 0}, {dt:.0f} s")
    assert ok


def test_criterion_9_property_suites(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    failures = []

    # steady-state simplex and scale covariance
    for _ in range(200):
        lam, m1, m2, m3, le = rng.uniform(0.1, 20, 5)
        p = rng.uniform()
        r = EquitableRates(lam, p, m1, m2, m3, le)
        pi = state_mass(build_equitable_model(r))
        if not (np.all(pi >= 0) and abs(pi.sum() - 1) <= 1e-12):
            failures.append("simplex")
        c = rng.uniform(0.1, 10)
        scaled = equitable_aoi(EquitableRates(c * lam, p, c * m1, c * m2, c * m3, c * le))
        if abs(scaled * c / equitable_aoi(r) - 1) > 1e-9:
            failures.append("scale covariance")

    # box feasibility and fixed-point residuals on solver outputs
    cfg = SolverConfig(multi_start=2)
    for lam, V, eta in ((1, 10, .5), (3, 5, .2), (10, 10, .02)):
        t = TypeProfile("a", 1.0, lam=lam, V=V, eta=eta, P_max=1, f_max=.8)
        res = mfe_solve([t], 30, 15, cfg)
        lo, hi = t.bounds()
        v = res.policies[0].vector()
        if not (np.all(v >= lo) and np.all(v <= hi)):
            failures.append("box (mfe)")
        if res.converged and mfe_residual(res, [t], 30, 15, cfg) > cfg.eps1:
            failures.append("mfe residual")
        ne = nash_solve([t] * 3, 15, cfg)
        for x in ne.policies:
            if not (np.all(x.vector() >= lo) and np.all(x.vector() <= hi)):
                failures.append("box (nash)")
    prim_cfg = preset("utilization")
    prim = PrimaryProfile(**prim_cfg["primary"])
    sec = TypeProfile("s", 1.0, lam=1, V=10, eta=.5, P_max=0, f_max=.7)
    mm = mm_mfe_solve(prim, [sec], 30, 1.0, 15, cfg)
    if not (np.all(mm.primary.vector() >= prim.bounds()[0]) and np.all(mm.primary.vector() <= prim.bounds()[1])):
        failures.append("box (primary)")
    if mm.converged and mm.residual > cfg.eps1:
        failures.append("mm residual")
    r = block_descent(lambda x: float(np.sum((x - 3) ** 2)), [0.5, 0.5], [0, 0], [1, 2])
    if not (r.x[0] == 1.0 and r.x[1] == 2.0):
        failures.append("box (descent)")

    # simulator determinism
    spec = NetworkSpec("equitable-full", [EquitableRates(3, .4, 1, 1, 6), EquitableRates(2, .2, 2, 1, 6)], 2e4, seed=11)
    if simulate(spec) != simulate(spec):
        failures.append("determinism")

    # CSV round trip
    vals = rng.standard_normal((50, 4)) * 10.0 ** rng.integers(-300, 300, (50, 4))
    t = ResultTable(["a", "b", "c", "d"], vals.tolist(), {"seed": 1})
    back = ResultTable.from_csv(t.to_csv())
    if back.rows != t.rows:
        failures.append("csv round trip")

    dt = time.perf_counter() - t0
    ok = not failures and dt < 120
    verdict(9, ok, f"failures: {sorted(set(failures)) or 'none'}, {dt:.0f} s")
    assert ok
