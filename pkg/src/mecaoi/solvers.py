"""Equilibrium solvers: mean-field fixed point, best-response Nash dynamics
and the major-minor (primary/secondary) mean-field fixed point.

Each outer iteration computes best responses against the current mean
field with block descent (warm-started from the previous iterate), then
applies the damped update ``rho <- (1 - g) rho + g F(policies)``. A run is
converged when the fixed-point residual ``|F(BR(rho)) - rho|`` is at most
``eps1``; the returned ``rho`` is the one the returned policies answer.
Several random starts are run and the lowest-cost converged one is kept.
"""

from __future__ import annotations

import math

import numpy as np

from .busy import t_primary_tx, t_secondary_tx
from .costs import (
    equitable_terms, exogenous_rate_of, mf_lambda_e, mf_lambda_s, mf_secondary_rates,
    primary_terms, secondary_terms,
)
from .game import (
    DevicePolicy, EquilibriumResult, NashResult, PrimaryProfile, SolverConfig, TypeProfile,
    check_profiles,
)
from .optim import block_descent, multi_start_descent


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _weighted(profiles, values) -> float:
    return float(sum(t.weight * v for t, v in zip(profiles, values)))


class _Damping:
    """Mean-field step ``rho <- (1 - g) rho + g target`` with ``g = gamma1``
    halved each time the residual changes sign (the last step overshot the
    fixed point). A steeply decreasing consistency map otherwise settles
    into a 2-cycle around its fixed point."""

    def __init__(self, gamma1: float):
        self.g = gamma1
        self.prev = 0.0

    def step(self, rho: float, target: float) -> float:
        d = target - rho
        if d * self.prev < 0:
            self.g = max(self.g / 2, 1e-6)
        self.prev = d
        return (1 - self.g) * rho + self.g * target


def _better(a: EquilibriumResult, b: EquilibriumResult | None) -> bool:
    # converged first, then lower cost; ties keep the earlier start
    if b is None:
        return True
    return (a.converged, -a.population_cost) > (b.converged, -b.population_cost)


# ------------------------------------------------------------------ equitable

def load_of(policy: DevicePolicy, lam: float) -> float:
    """Departure rate of a device's transmitter, ``lam q mu1 / (lam q + mu1)``."""
    a = lam * (1.0 - policy.p)
    return a * policy.mu1 / (a + policy.mu1) if a > 0 and policy.mu1 > 0 else 0.0


def equitable_consistency(profiles, policies, mu3: float) -> float:
    """``E_phi[lam q mu1 / (lam q + mu1)] / mu3``: the load the policies put on the ES."""
    return _weighted(profiles, [load_of(x, t.lam) for t, x in zip(profiles, policies)]) / mu3


def mf_best_response(profile: TypeProfile, rho: float, N: int, mu3: float, cfg: SolverConfig = SolverConfig(),
                     init: DevicePolicy | None = None, rng=None) -> tuple[DevicePolicy, float]:
    """Multi-start best response of one type to a fixed mean field ``rho``."""
    le = mf_lambda_e(rho, N, mu3)

    def f(x):
        return equitable_terms(DevicePolicy.from_vector(x), profile, le, mu3).total

    rng = _rng(cfg.seed, 0) if rng is None else rng
    lo, hi = profile.bounds()
    r = multi_start_descent(f, lo, hi, cfg, rng, None if init is None else init.vector())
    return DevicePolicy.from_vector(r.x), r.cost


def _mfe_run(profiles, N, mu3, cfg, init_policies, start):
    policies = list(init_policies)
    rho = equitable_consistency(profiles, policies, mu3)
    damping = _Damping(cfg.gamma1)
    trace = [rho]
    converged = False
    residual = math.inf
    k = 0
    for k in range(1, cfg.max_outer + 1):
        le = mf_lambda_e(rho, N, mu3)
        inner_ok = True
        for i, t in enumerate(profiles):
            def f(x, t=t):
                return equitable_terms(DevicePolicy.from_vector(x), t, le, mu3).total
            r = block_descent(f, policies[i].vector(), *t.bounds(), cfg)
            policies[i] = DevicePolicy.from_vector(r.x)
            inner_ok &= r.converged
        target = equitable_consistency(profiles, policies, mu3)
        residual = abs(target - rho)
        if residual <= cfg.eps1 and inner_ok:
            converged = True
            break
        rho = damping.step(rho, target)
        trace.append(rho)
    le = mf_lambda_e(rho, N, mu3)
    costs = tuple(equitable_terms(x, t, le, mu3) for t, x in zip(profiles, policies))
    return EquilibriumResult(
        policies=tuple(policies), rho=rho, costs=costs, converged=converged, residual=residual,
        trace=tuple(trace), iterations=k, start=start,
        population_cost=_weighted(profiles, [c.total for c in costs]),
    )


def _random_policy(rng, lo, hi) -> DevicePolicy:
    return DevicePolicy.from_vector(rng.uniform(lo, hi))


def mfe_solve(profiles, N: int, mu3: float, cfg: SolverConfig = SolverConfig(), init=None) -> EquilibriumResult:
    """Mean-field equilibrium of the equitable-access game.

    ``init`` optionally gives one DevicePolicy per type for the first start;
    the remaining starts draw policies uniformly from each type's box.
    """
    profiles = check_profiles(profiles)
    if N < 1 or mu3 <= 0:
        raise ValueError("need N >= 1 and mu3 > 0")
    best = None
    for s in range(cfg.multi_start):
        rng = _rng(cfg.seed, s)
        if s == 0 and init is not None:
            start = list(init)
        else:
            start = [_random_policy(rng, *t.bounds()) for t in profiles]
        res = _mfe_run(profiles, N, mu3, cfg, start, s)
        if _better(res, best):
            best = res
    return best


def mfe_residual(result: EquilibriumResult, profiles, N: int, mu3: float, cfg: SolverConfig = SolverConfig()) -> float:
    """``|F(BR(rho)) - rho|`` recomputed from scratch (best responses
    warm-started at the returned policies)."""
    profiles = check_profiles(profiles)
    le = mf_lambda_e(result.rho, N, mu3)
    policies = []
    for t, x in zip(profiles, result.policies):
        def f(v, t=t):
            return equitable_terms(DevicePolicy.from_vector(v), t, le, mu3).total
        policies.append(DevicePolicy.from_vector(block_descent(f, x.vector(), *t.bounds(), cfg).x))
    return abs(equitable_consistency(profiles, policies, mu3) - result.rho)


# ---------------------------------------------------------------------- Nash

def nash_solve(devices, mu3: float, cfg: SolverConfig = SolverConfig(), init=None) -> NashResult:
    """Cyclic best-response dynamics over ``devices`` (TypeProfiles; the
    weight field is ignored). Each device descends against the exogenous
    rate of the current others; stops when a full sweep moves every policy
    coordinate by at most ``eps1``. Best-response dynamics need not
    converge; exhaustion is reported through ``converged``."""
    devices = tuple(devices)
    if not devices:
        raise ValueError("at least one device is required")
    if init is None:
        rng = _rng(cfg.seed, 0)
        x0 = rng.uniform(*devices[0].bounds())
        # one shared draw, clipped into each box, keeps symmetric games symmetric
        init = [DevicePolicy.from_vector(np.clip(x0, *d.bounds())) for d in devices]
    policies = list(init)
    if len(policies) != len(devices):
        raise ValueError("init must give one policy per device")
    converged = False
    move = math.inf
    sweep = 0
    for sweep in range(1, cfg.max_outer + 1):
        move = 0.0
        inner_ok = True
        for j, d in enumerate(devices):
            le = exogenous_rate_of(devices, policies, skip=j)

            def f(x, d=d, le=le):
                return equitable_terms(DevicePolicy.from_vector(x), d, le, mu3).total
            r = block_descent(f, policies[j].vector(), *d.bounds(), cfg)
            move = max(move, float(np.max(np.abs(r.x - policies[j].vector()))))
            policies[j] = DevicePolicy.from_vector(r.x)
            inner_ok &= r.converged
        if move <= cfg.eps1 and inner_ok:
            converged = True
            break
    costs = tuple(
        equitable_terms(x, d, exogenous_rate_of(devices, policies, skip=j), mu3)
        for j, (d, x) in enumerate(zip(devices, policies))
    )
    return NashResult(tuple(policies), costs, converged, sweep, move)


def finite_game_costs(devices, policies, mu3: float) -> tuple:
    """Each device's cost when all play ``policies`` in the N-device game."""
    return tuple(
        equitable_terms(x, d, exogenous_rate_of(devices, policies, skip=j), mu3)
        for j, (d, x) in enumerate(zip(devices, policies))
    )


# -------------------------------------------------------------- major-minor

def priority_consistency(profiles, policies, primary: DevicePolicy) -> float:
    """``E_phi[lam q] / mu1P``: secondary load per unit of transmitter capacity."""
    offered = _weighted(profiles, [t.lam * (1.0 - x.p) for t, x in zip(profiles, policies)])
    if offered == 0:
        return 0.0
    return offered / primary.mu1 if primary.mu1 > 0 else math.inf


def utilization(params: PrimaryProfile, primary: DevicePolicy, lambda_s: float) -> tuple[float, float]:
    """``(t_TP1, t_TP2)``: transmitter busy fractions for class-P and secondary traffic."""
    return (
        t_primary_tx(params.lam_P, primary.p, primary.mu1),
        t_secondary_tx(params.lam_P, primary.p, primary.mu1, lambda_s),
    )


def primary_best_response(params: PrimaryProfile, rho: float, N: int, alpha: float, mu3: float,
                          cfg: SolverConfig, init: DevicePolicy) -> tuple[DevicePolicy, bool]:
    def f(x):
        pol = DevicePolicy.from_vector(x)
        return primary_terms(pol, params, mf_lambda_s(rho, N, pol.mu1), alpha, mu3).total
    r = block_descent(f, init.vector(), *params.bounds(), cfg, eps=cfg.eps3, gamma=cfg.gamma3)
    return DevicePolicy.from_vector(r.x), r.converged


def solo_primary(params: PrimaryProfile, mu3: float, cfg: SolverConfig = SolverConfig(),
                 init: DevicePolicy | None = None) -> tuple[DevicePolicy, float]:
    """Primary alone (no secondaries, no price): multi-start minimization of its cost."""
    def f(x):
        return primary_terms(DevicePolicy.from_vector(x), params, 0.0, 0.0, mu3).total
    r = multi_start_descent(f, *params.bounds(), cfg, _rng(cfg.seed, 0),
                            None if init is None else init.vector(), eps=cfg.eps3, gamma=cfg.gamma3)
    return DevicePolicy.from_vector(r.x), r.cost


def _mm_run(params, profiles, N, alpha, mu3, cfg, primary, policies, start):
    policies = list(policies)
    variant = cfg.secondary_variant
    rho = priority_consistency(profiles, policies, primary)
    rho = rho if math.isfinite(rho) else 0.0
    damping = _Damping(cfg.gamma1)
    trace = [rho]
    converged = False
    residual = math.inf
    k = 0
    for k in range(1, cfg.max_outer + 1):
        primary, inner_ok = primary_best_response(params, rho, N, alpha, mu3, cfg, primary)
        le, ls = mf_secondary_rates(rho, N, primary.mu1)
        for i, t in enumerate(profiles):
            def f(x, t=t):
                return secondary_terms(DevicePolicy.from_vector(x), t, primary, params,
                                       le, ls, alpha, mu3, variant).total
            r = block_descent(f, policies[i].vector(), *t.bounds(secondary=True), cfg)
            policies[i] = DevicePolicy.from_vector(r.x)
            inner_ok &= r.converged
        target = priority_consistency(profiles, policies, primary)
        residual = abs(target - rho)
        if not math.isfinite(target):
            break
        if residual <= cfg.eps1 and inner_ok:
            converged = True
            break
        rho = damping.step(rho, target)
        trace.append(rho)
    ls = mf_lambda_s(rho, N, primary.mu1)
    le, _ = mf_secondary_rates(rho, N, primary.mu1)
    pcost = primary_terms(primary, params, ls, alpha, mu3)
    costs = tuple(secondary_terms(x, t, primary, params, le, ls, alpha, mu3, variant)
                  for t, x in zip(profiles, policies))
    t1, t2 = utilization(params, primary, ls)
    return EquilibriumResult(
        policies=tuple(policies), rho=rho, costs=costs, converged=converged, residual=residual,
        trace=tuple(trace), primary=primary, primary_cost=pcost, iterations=k, start=start,
        population_cost=pcost.total + _weighted(profiles, [c.total for c in costs]),
        extras={"t_TP1": t1, "t_TP2": t2, "lambda_s": ls},
    )


def mm_mfe_solve(params: PrimaryProfile, profiles, N: int, alpha: float, mu3: float,
                 cfg: SolverConfig = SolverConfig(), init_primary: DevicePolicy | None = None,
                 init_secondary=None) -> EquilibriumResult:
    """Major-minor mean-field equilibrium of the priority-access game.

    Per outer iteration the primary best-responds with ``lambda_s = N mu1P
    rho``, then each secondary type against the new primary policy, then
    ``rho`` moves toward ``E[lam q] / mu1P``. Starts are ranked by the
    primary cost plus the type-weighted secondary cost.
    """
    profiles = check_profiles(profiles)
    if N < 1 or mu3 <= 0 or alpha < 0:
        raise ValueError("need N >= 1, mu3 > 0 and alpha >= 0")
    best = None
    for s in range(cfg.multi_start):
        rng = _rng(cfg.seed, s)
        prim = _random_policy(rng, *params.bounds())
        secs = [_random_policy(rng, *t.bounds(secondary=True)) for t in profiles]
        if s == 0:
            prim = init_primary if init_primary is not None else prim
            secs = list(init_secondary) if init_secondary is not None else secs
        res = _mm_run(params, profiles, N, alpha, mu3, cfg, prim, secs, s)
        if _better(res, best):
            best = res
    return best
