"""
The three MEC age-of-information models: equitable access, and the primary
and secondary users under priority access.

Age coordinates are ordered (monitor, transmitter, local processor, edge
server). Rate labels in the tables:

    lp   arrivals routed to the local processor (lambda * p)
    lq   arrivals routed to the transmitter (lambda * (1 - p))
    le   exogenous stream from the other (secondary) users
    lP   primary offload stream seen by a secondary user
    mu1  transmitter service rate
    mu2  local processor service rate
    mu3  edge server service rate

A reset tuple lists, for each coordinate of x', the coordinate of x it copies
(None resets it to zero). So ``(0, 1, None, 3)`` is ``x' = [x0 x1 0 x3]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .chains import enumerate_chain
from .shs import ShsModel, TableTemplate, solve_steady_state

N = None

EQUITABLE_STATES = (
    "s1: T freshest, L 2nd freshest, ES oldest",
    "s2: T freshest, L oldest, ES 2nd freshest",
    "s3: T 2nd freshest, L freshest, ES oldest",
    "s4: T idle, L freshest, ES 2nd freshest",
    "s5: T idle, L 2nd freshest, ES freshest",
    "s6: T idle, L freshest, ES exogenous",
    "s7: T freshest, L 2nd freshest, ES exogenous",
    "s8: T 2nd freshest, L freshest, ES exogenous",
)

# T does not age while idle (s4-s6); it precedes the exogenous merge point.
EQUITABLE_GROWTH = [[1, 1, 1, 1]] * 3 + [[1, 0, 1, 1]] * 3 + [[1, 1, 1, 1]] * 2

EQUITABLE_TABLE = (
    (0, "lp", 2, (0, 1, N, 3)),
    (0, "lq", 0, (0, N, 2, 3)),
    (0, "le", 6, (0, 1, 2, 0)),
    (0, "mu1", 4, (0, N, 2, 1)),
    (0, "mu2", 0, (2, 1, 2, 2)),
    (0, "mu3", 0, (3, 1, 2, 3)),
    (1, "lp", 2, (0, 1, N, 3)),
    (1, "lq", 1, (0, N, 2, 3)),
    (1, "le", 6, (0, 1, 2, 0)),
    (1, "mu1", 4, (0, N, 2, 1)),
    (1, "mu2", 1, (2, 1, 2, 3)),
    (1, "mu3", 1, (3, 1, 3, 3)),
    (2, "lp", 2, (0, 1, N, 3)),
    (2, "lq", 0, (0, N, 2, 3)),
    (2, "le", 7, (0, 1, 2, 0)),
    (2, "mu1", 3, (0, N, 2, 1)),
    (2, "mu2", 2, (2, 2, 2, 2)),
    (2, "mu3", 2, (3, 1, 2, 3)),
    (3, "lp", 3, (0, N, N, 3)),
    (3, "lq", 0, (0, N, 2, 3)),
    (3, "le", 5, (0, N, 2, 0)),
    (3, "mu2", 3, (2, N, 2, 2)),
    (3, "mu3", 3, (3, N, 2, 3)),
    (4, "lp", 3, (0, N, N, 3)),
    (4, "lq", 1, (0, N, 2, 3)),
    (4, "le", 5, (0, N, 2, 0)),
    (4, "mu2", 4, (2, N, 2, 3)),
    (4, "mu3", 4, (3, N, 3, 3)),
    (5, "lp", 5, (0, N, N, 3)),
    (5, "lq", 6, (0, N, 2, 3)),
    (5, "le", 5, (0, N, 2, 0)),
    (5, "mu2", 5, (2, N, 2, 2)),
    (5, "mu3", 5, (3, N, 2, 3)),
    (6, "lp", 7, (0, 1, N, 3)),
    (6, "lq", 6, (0, N, 2, 3)),
    (6, "le", 6, (0, 1, 2, 0)),
    (6, "mu1", 4, (0, N, 2, 1)),
    (6, "mu2", 6, (2, 1, 2, 2)),
    (6, "mu3", 6, (3, 1, 2, 3)),
    (7, "lp", 7, (0, 1, N, 3)),
    (7, "lq", 6, (0, N, 2, 3)),
    (7, "le", 7, (0, 1, 2, 0)),
    (7, "mu1", 3, (0, N, 2, 1)),
    (7, "mu2", 7, (2, 2, 2, 2)),
    (7, "mu3", 7, (3, 1, 2, 3)),
)

# The primary user's chain is the equitable chain restricted to s1-s5 with
# no exogenous stream: secondary traffic never touches a primary packet.
PRIMARY_STATES = EQUITABLE_STATES[:5]
PRIMARY_GROWTH = EQUITABLE_GROWTH[:5]
PRIMARY_TABLE = tuple(row for row in EQUITABLE_TABLE if row[0] < 5 and row[1] != "le")

SECONDARY_STATES = (
    "s1: T freshest, L 2nd freshest, ES oldest",
    "s2: T freshest, L oldest, ES 2nd freshest",
    "s3: T freshest, L 2nd freshest, ES class P",
    "s4: T 2nd freshest, L freshest, ES oldest",
    "s5: T class P, L freshest, ES 2nd freshest",
    "s6: T 2nd freshest, L freshest, ES class P",
    "s7: T class P, L freshest, ES class P",
    "s8: T class P, L 2nd freshest, ES freshest",
    "s9: T oldest, L freshest, ES 2nd freshest",
    "s10: T oldest, L 2nd freshest, ES freshest",
)

# fake updates run in every server, so every age grows everywhere
SECONDARY_GROWTH = [[1, 1, 1, 1]] * 10

SECONDARY_TABLE = (
    (0, "lp", 3, (0, 1, N, 3)),
    (0, "lq", 0, (0, N, 2, 3)),
    (0, "le", 8, (0, 0, 2, 3)),
    (0, "lP", 4, (0, 0, 2, 3)),
    (0, "mu1", 9, (0, 1, 2, 1)),
    (0, "mu2", 0, (2, 1, 2, 2)),
    (0, "mu3", 0, (3, 1, 2, 3)),
    (1, "lp", 3, (0, 1, N, 3)),
    (1, "lq", 1, (0, N, 2, 3)),
    (1, "le", 9, (0, 0, 2, 3)),
    (1, "lP", 7, (0, 0, 2, 3)),
    (1, "mu1", 9, (0, 1, 2, 1)),
    (1, "mu2", 1, (2, 1, 2, 3)),
    (1, "mu3", 1, (3, 1, 3, 3)),
    (2, "lp", 5, (0, 1, N, 3)),
    (2, "lq", 2, (0, N, 2, 3)),
    (2, "le", 5, (0, 0, 2, 3)),
    (2, "lP", 6, (0, 0, 2, 3)),
    (2, "mu1", 5, (0, 0, 2, 3)),
    (2, "mu2", 2, (2, 1, 2, 2)),
    (2, "mu3", 0, (3, 1, 2, 3)),
    (3, "lp", 3, (0, 1, N, 3)),
    (3, "lq", 0, (0, N, 2, 3)),
    (3, "le", 8, (0, 0, 2, 3)),
    (3, "lP", 4, (0, 0, 2, 3)),
    (3, "mu1", 8, (0, 1, 2, 1)),
    (3, "mu2", 3, (2, 2, 2, 2)),
    (3, "mu3", 3, (3, 1, 2, 3)),
    (4, "lp", 4, (0, 1, N, 3)),
    (4, "lq", 4, (0, 1, 2, 3)),
    (4, "le", 4, (0, 1, 2, 3)),
    (4, "lP", 4, (0, 0, 2, 3)),
    (4, "mu1", 5, (0, 1, 2, 1)),
    (4, "mu2", 4, (2, 2, 2, 2)),
    (4, "mu3", 4, (3, 3, 2, 3)),
    (5, "lp", 5, (0, 1, N, 3)),
    (5, "lq", 2, (0, N, 2, 3)),
    (5, "le", 5, (0, 0, 2, 3)),
    (5, "lP", 6, (0, 0, 2, 3)),
    (5, "mu1", 5, (0, 0, 2, 3)),
    (5, "mu2", 5, (2, 2, 2, 2)),
    (5, "mu3", 3, (3, 1, 2, 3)),
    (6, "lp", 6, (0, 1, N, 3)),
    (6, "lq", 6, (0, 1, 2, 3)),
    (6, "le", 6, (0, 1, 2, 3)),
    (6, "lP", 6, (0, 0, 2, 3)),
    (6, "mu1", 5, (0, 1, 2, 1)),
    (6, "mu2", 6, (2, 2, 2, 2)),
    (6, "mu3", 4, (3, 3, 2, 3)),
    (7, "lp", 4, (0, 1, N, 3)),
    (7, "lq", 7, (0, 1, 2, 3)),
    (7, "le", 7, (0, 1, 2, 3)),
    (7, "lP", 7, (0, 0, 2, 3)),
    (7, "mu1", 5, (0, 1, 2, 1)),
    (7, "mu2", 7, (2, 2, 2, 3)),
    (7, "mu3", 7, (3, 3, 3, 3)),
    (8, "lp", 8, (0, 1, N, 3)),
    (8, "lq", 0, (0, N, 2, 3)),
    (8, "le", 8, (0, 0, 2, 3)),
    (8, "lP", 4, (0, 0, 2, 3)),
    (8, "mu1", 8, (0, 1, 2, 1)),
    (8, "mu2", 8, (2, 2, 2, 2)),
    (8, "mu3", 8, (3, 3, 2, 3)),
    (9, "lp", 8, (0, 1, N, 3)),
    (9, "lq", 1, (0, N, 2, 3)),
    (9, "le", 9, (0, 0, 2, 3)),
    (9, "lP", 7, (0, 0, 2, 3)),
    (9, "mu1", 8, (0, 1, 2, 1)),
    (9, "mu2", 9, (2, 2, 2, 3)),
    (9, "mu3", 9, (3, 3, 3, 3)),
)


def _check(name: str, value: float, lo: float = 0.0, strict: bool = True, hi: float | None = None):
    bad = not math.isfinite(value) or (value <= lo if strict else value < lo)
    if hi is not None and value > hi:
        bad = True
    if bad:
        bound = f"> {lo}" if strict else f">= {lo}"
        if hi is not None:
            bound = f"in [{lo}, {hi}]"
        raise ValueError(f"{name} must be {bound}, got {value!r}")


@dataclass(frozen=True)
class EquitableRates:
    lam: float
    p: float
    mu1: float
    mu2: float
    mu3: float
    lambda_e: float = 0.0

    def __post_init__(self):
        for name in ("lam", "mu1", "mu2", "mu3"):
            _check(name, getattr(self, name))
        _check("p", self.p, 0.0, strict=False, hi=1.0)
        _check("lambda_e", self.lambda_e, strict=False)

    def labels(self) -> dict[str, float]:
        return {
            "lp": self.lam * self.p,
            "lq": self.lam * (1.0 - self.p),
            "le": self.lambda_e,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "mu3": self.mu3,
        }


@dataclass(frozen=True)
class PrimaryRates:
    lam_P: float
    p_P: float
    mu1P: float
    mu2P: float
    mu3: float

    def __post_init__(self):
        for name in ("lam_P", "mu1P", "mu2P", "mu3"):
            _check(name, getattr(self, name))
        _check("p_P", self.p_P, 0.0, strict=False, hi=1.0)

    def labels(self) -> dict[str, float]:
        return {
            "lp": self.lam_P * self.p_P,
            "lq": self.lam_P * (1.0 - self.p_P),
            "mu1": self.mu1P,
            "mu2": self.mu2P,
            "mu3": self.mu3,
        }


@dataclass(frozen=True)
class SecondaryRates:
    lam: float
    p: float
    mu2: float
    mu1: float
    mu3: float
    lambda_e: float = 0.0
    lambda_P_bar: float = 0.0

    def __post_init__(self):
        for name in ("lam", "mu1", "mu2", "mu3"):
            _check(name, getattr(self, name))
        _check("p", self.p, 0.0, strict=False, hi=1.0)
        _check("lambda_e", self.lambda_e, strict=False)
        _check("lambda_P_bar", self.lambda_P_bar, strict=False)

    def labels(self) -> dict[str, float]:
        return {
            "lp": self.lam * self.p,
            "lq": self.lam * (1.0 - self.p),
            "le": self.lambda_e,
            "lP": self.lambda_P_bar,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "mu3": self.mu3,
        }


EQUITABLE = TableTemplate(EQUITABLE_STATES, EQUITABLE_GROWTH, EQUITABLE_TABLE)
PRIMARY = TableTemplate(PRIMARY_STATES, PRIMARY_GROWTH, PRIMARY_TABLE)
SECONDARY = TableTemplate(SECONDARY_STATES, SECONDARY_GROWTH, SECONDARY_TABLE)
# The printed 10-state secondary table merges an idle transmitter with one
# holding another secondary's packet, so it is not exact for the LCFS-PP
# network. The enumerated chain is; both are available.
SECONDARY_EXACT = TableTemplate(*enumerate_chain("secondary"))
SECONDARY_VARIANTS = {"printed": SECONDARY, "exact": SECONDARY_EXACT}


def _secondary_template(variant: str) -> TableTemplate:
    try:
        return SECONDARY_VARIANTS[variant]
    except KeyError:
        raise ValueError(f"variant must be one of {tuple(SECONDARY_VARIANTS)}, got {variant!r}") from None


def build_equitable_model(r: EquitableRates) -> ShsModel:
    return EQUITABLE.model(r.labels())


def build_primary_model(r: PrimaryRates, lambda_s: float = 0.0) -> ShsModel:
    """Five-state primary chain. ``lambda_s`` is accepted and ignored:
    priority preemption makes the primary age blind to secondary load."""
    _check("lambda_s", lambda_s, strict=False)
    return PRIMARY.model(r.labels())


def build_secondary_model(r: SecondaryRates, variant: str = "printed") -> ShsModel:
    """Secondary-user chain: the printed 10-state table, or ``variant="exact"``
    for the 27-state chain enumerated from the queueing rules."""
    return _secondary_template(variant).model(r.labels())


def equitable_aoi(r: EquitableRates) -> float:
    return EQUITABLE.average_aoi(r.labels())


def primary_aoi(r: PrimaryRates) -> float:
    return PRIMARY.average_aoi(r.labels())


def secondary_aoi(r: SecondaryRates, variant: str = "printed") -> float:
    return _secondary_template(variant).average_aoi(r.labels())


class ClosedFormSingularity(ZeroDivisionError):
    """The printed primary AoI expression divides by (mu1P - mu3)."""


def primary_aoi_closed_form(r: PrimaryRates, rel_tol: float = 1e-6) -> float:
    """Closed-form primary-user average AoI.

    The expression has a removable singularity at mu1P == mu3; within
    ``rel_tol`` of it a ClosedFormSingularity is raised and the caller
    should use ``primary_aoi`` (the linear-system route) instead.
    """
    lam, p, m1, m2, m3 = r.lam_P, r.p_P, r.mu1P, r.mu2P, r.mu3
    if abs(m1 - m3) <= rel_tol * m3:
        raise ClosedFormSingularity(
            f"mu1P={m1} is within relative {rel_tol} of mu3={m3}; use primary_aoi()"
        )
    q = 1.0 - p
    t1 = (m1 + m2 + m3) / ((m1 + m2) * (m2 + m3))
    t2 = m1 * m3 * (lam + m2) / (lam * (m1 + m2) * (m2 + m3) * (lam * q + m2))
    t3 = m2 * m3 * (lam + m1) / (lam * (m1 + m2) * (m1 - m3) * (m1 + lam * p))
    t4 = m1 * m2 * (lam + m3) / (lam * (m1 - m3) * (m2 + m3) * (m3 + lam * p))
    return t1 + t2 - t3 + t4


def primary_aoi_any(r: PrimaryRates) -> float:
    """Closed form where it is well defined, linear system otherwise."""
    try:
        return primary_aoi_closed_form(r)
    except ClosedFormSingularity:
        return primary_aoi(r)


def exogenous_rate(others: Iterable[tuple[float, float, float]]) -> float:
    """Summed Poisson-approximated departure rate of the other transmitters.

    Each entry is ``(lambda_j, p_j, mu1_j)``; transmitter j contributes
    ``lambda_j q_j mu1_j / (lambda_j q_j + mu1_j)`` with ``q_j = 1 - p_j``.
    """
    total = 0.0
    for lam, p, mu1 in others:
        _check("lambda_j", lam, strict=False)
        _check("p_j", p, 0.0, strict=False, hi=1.0)
        _check("mu1_j", mu1, strict=False)
        off = lam * (1.0 - p)
        if off > 0 and mu1 > 0:
            total += off * mu1 / (off + mu1)
    return total


def state_mass(model: ShsModel) -> np.ndarray:
    return solve_steady_state(model).pi
