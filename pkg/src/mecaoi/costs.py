"""Device cost functions: power spent plus V-weighted average AoI.

Policies may sit anywhere in their box, including ``mu = 0`` and
``p in {0, 1}``. A path that cannot deliver (no arrivals or a zero service
rate) simply drops out of the age process; if the offloading path is dead
the device is a lone LCFS-P M/M/1 server with age ``1/(lam p) + 1/mu2``.
"""

from __future__ import annotations

import math

from .busy import t_local, t_primary_tx, t_secondary_tx, t_transmit
from .game import CostTerms, DevicePolicy, PrimaryProfile, TypeProfile
from .models import EQUITABLE, PRIMARY, _secondary_template, exogenous_rate


def _delta(template, lp, lq, mu1, mu2, extra) -> float:
    tx = lq > 0 and mu1 > 0
    loc = lp > 0 and mu2 > 0
    if not tx:
        return 1.0 / lp + 1.0 / mu2 if loc else math.inf
    rates = dict(extra, lp=lp if loc else 0.0, lq=lq, mu1=mu1, mu2=mu2 if loc else 1.0)
    return template.average_aoi(rates)


def equitable_delta(lam, p, mu1, mu2, mu3, lambda_e) -> float:
    return _delta(EQUITABLE, lam * p, lam * (1.0 - p), mu1, mu2, {"le": lambda_e, "mu3": mu3})


def primary_delta(lam_P, p_P, mu1P, mu2P, mu3) -> float:
    return _delta(PRIMARY, lam_P * p_P, lam_P * (1.0 - p_P), mu1P, mu2P, {"mu3": mu3})


def secondary_delta(lam, p, mu2, mu1P, mu3, lambda_e, lambda_P_bar, variant="printed") -> float:
    extra = {"le": lambda_e, "lP": lambda_P_bar, "mu3": mu3}
    return _delta(_secondary_template(variant), lam * p, lam * (1.0 - p), mu1P, mu2, extra)


def _aoi_term(V, delta_fn):
    # V = 0 makes the age irrelevant, even where it is infinite
    return 0.0 if V == 0 else V * delta_fn()


# ------------------------------------------------------------------ equitable

def equitable_terms(policy: DevicePolicy, profile: TypeProfile, lambda_e: float, mu3: float) -> CostTerms:
    lam, p, mu1, mu2 = profile.lam, policy.p, policy.mu1, policy.mu2
    return CostTerms(
        transmit=t_transmit(lam, p, mu1) * mu1,
        local=t_local(lam, p, mu2) * profile.eta * mu2**3,
        aoi=_aoi_term(profile.V, lambda: equitable_delta(lam, p, mu1, mu2, mu3, lambda_e)),
    )


def cost_equitable(policy: DevicePolicy, profile: TypeProfile, lambda_e: float, mu3: float) -> float:
    """``J = t_T mu1 + t_L eta mu2^3 + V Delta`` against exogenous rate ``lambda_e``."""
    return equitable_terms(policy, profile, lambda_e, mu3).total


def mf_lambda_e(rho: float, N: int, mu3: float) -> float:
    """Mean-field exogenous rate at the edge server, ``(N - 1) rho mu3``."""
    return (N - 1) * rho * mu3


def cost_mf_equitable(policy: DevicePolicy, profile: TypeProfile, rho: float, N: int, mu3: float) -> float:
    return cost_equitable(policy, profile, mf_lambda_e(rho, N, mu3), mu3)


# ------------------------------------------------------------------- priority

def primary_terms(policy: DevicePolicy, params: PrimaryProfile, lambda_s: float, alpha: float, mu3: float) -> CostTerms:
    lam, p, mu1, mu2 = params.lam_P, policy.p, policy.mu1, policy.mu2
    t1 = t_primary_tx(lam, p, mu1)
    t2 = t_secondary_tx(lam, p, mu1, lambda_s)
    return CostTerms(
        transmit=(t1 + t2) * mu1,
        local=t_local(lam, p, mu2) * params.eta * mu2**3,
        aoi=_aoi_term(params.V, lambda: primary_delta(lam, p, mu1, mu2, mu3)),
        revenue=-alpha * t2,
    )


def cost_primary(policy: DevicePolicy, params: PrimaryProfile, lambda_s: float, alpha: float, mu3: float) -> float:
    """``J_P = t_TP mu1P + t_LP eta_P mu2P^3 + V_P Delta_P - alpha t_TP2``.

    The primary age does not depend on ``lambda_s``; only the transmit
    power and the revenue do.
    """
    return primary_terms(policy, params, lambda_s, alpha, mu3).total


def mf_lambda_s(rho: float, N: int, mu1P: float) -> float:
    """Mean-field secondary load at the primary transmitter, ``N mu1P rho``."""
    return N * mu1P * rho


def cost_mf_primary(policy: DevicePolicy, params: PrimaryProfile, rho: float, N: int, alpha: float, mu3: float) -> float:
    return cost_primary(policy, params, mf_lambda_s(rho, N, policy.mu1), alpha, mu3)


def secondary_terms(
    policy: DevicePolicy, profile: TypeProfile, primary: DevicePolicy, params: PrimaryProfile,
    lambda_e: float, lambda_s: float, alpha: float, mu3: float, variant: str = "printed",
) -> CostTerms:
    lam, p, mu2 = profile.lam, policy.p, policy.mu2
    mu1P = primary.mu1
    lambda_P_bar = params.lam_P * (1.0 - primary.p)
    t2 = t_secondary_tx(params.lam_P, primary.p, mu1P, lambda_s)
    return CostTerms(
        transmit=0.0,
        local=t_local(lam, p, mu2) * profile.eta * mu2**3,
        aoi=_aoi_term(profile.V, lambda: secondary_delta(lam, p, mu2, mu1P, mu3, lambda_e, lambda_P_bar, variant)),
        revenue=alpha * t2 * lam * (1.0 - p),
    )


def cost_secondary(
    policy: DevicePolicy, profile: TypeProfile, primary: DevicePolicy, params: PrimaryProfile,
    lambda_e: float, lambda_s: float, alpha: float, mu3: float, variant: str = "printed",
) -> float:
    """``J_S = t_L eta mu2^3 + V Delta_S + alpha t_TP2 lam q``.

    ``lambda_e`` is the other secondaries' offload rate at the primary
    transmitter and ``lambda_s`` the total secondary offload rate there.
    """
    return secondary_terms(policy, profile, primary, params, lambda_e, lambda_s, alpha, mu3, variant).total


def mf_secondary_rates(rho: float, N: int, mu1P: float) -> tuple[float, float]:
    """``(lambda_e, lambda_s) = ((N - 1) mu1P rho, N mu1P rho)``."""
    return (N - 1) * mu1P * rho, N * mu1P * rho


def cost_mf_secondary(
    policy: DevicePolicy, profile: TypeProfile, primary: DevicePolicy, params: PrimaryProfile,
    rho: float, N: int, alpha: float, mu3: float, variant: str = "printed",
) -> float:
    le, ls = mf_secondary_rates(rho, N, primary.mu1)
    return cost_secondary(policy, profile, primary, params, le, ls, alpha, mu3, variant)


def exogenous_rate_of(devices, policies, skip: int) -> float:
    """Exogenous edge-server rate seen by device ``skip`` in the finite game."""
    return exogenous_rate(
        (d.lam, x.p, x.mu1) for j, (d, x) in enumerate(zip(devices, policies)) if j != skip
    )
