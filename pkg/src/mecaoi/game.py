"""Domain types shared by the cost functions, optimizers and solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _nonneg(name, value):
    if not (np.isfinite(value) and value >= 0):
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class DevicePolicy:
    """Offloading policy: local probability ``p`` and service rates.

    Secondary users own no transmitter, so their ``mu1`` is ``None``.
    """

    p: float
    mu1: float | None
    mu2: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must be in [0, 1], got {self.p!r}")
        if self.mu1 is not None:
            _nonneg("mu1", self.mu1)
        _nonneg("mu2", self.mu2)

    @property
    def is_secondary(self) -> bool:
        return self.mu1 is None

    def vector(self) -> np.ndarray:
        """Decision coordinates in descent order: (p, mu1, mu2) or (p, mu2)."""
        if self.mu1 is None:
            return np.array([self.p, self.mu2])
        return np.array([self.p, self.mu1, self.mu2])

    @classmethod
    def from_vector(cls, x) -> DevicePolicy:
        x = [float(v) for v in x]
        if len(x) == 2:
            return cls(x[0], None, x[1])
        return cls(*x)


@dataclass(frozen=True)
class TypeProfile:
    """A device type: its weight in the population and its parameters.

    ``P_max`` bounds the transmitter rate ``mu1`` and ``f_max`` the local
    processor rate ``mu2``. Secondary types ignore ``P_max``.
    """

    name: str
    weight: float
    lam: float
    V: float
    eta: float
    P_max: float
    f_max: float

    def __post_init__(self):
        for k in ("weight", "lam", "V", "eta", "P_max", "f_max"):
            _nonneg(k, getattr(self, k))
        if self.weight > 1.0:
            raise ValueError(f"weight must be <= 1, got {self.weight!r}")

    def bounds(self, secondary: bool = False):
        if secondary:
            return np.array([0.0, 0.0]), np.array([1.0, self.f_max])
        return np.array([0.0, 0.0, 0.0]), np.array([1.0, self.P_max, self.f_max])


@dataclass(frozen=True)
class PrimaryProfile:
    """Primary device parameters (the major player)."""

    lam_P: float
    V: float
    eta: float
    P_max: float
    f_max: float

    def __post_init__(self):
        for k in ("lam_P", "V", "eta", "P_max", "f_max"):
            _nonneg(k, getattr(self, k))

    def bounds(self):
        return np.array([0.0, 0.0, 0.0]), np.array([1.0, self.P_max, self.f_max])


def check_profiles(profiles) -> tuple[TypeProfile, ...]:
    profiles = tuple(profiles)
    if not profiles:
        raise ValueError("at least one type profile is required")
    total = sum(t.weight for t in profiles)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"type weights must sum to 1, got {total!r}")
    return profiles


@dataclass(frozen=True)
class MeanField:
    """Mean load on the shared resource (edge server or primary transmitter)."""

    rho: float

    def __post_init__(self):
        _nonneg("rho", self.rho)


@dataclass(frozen=True)
class SolverConfig:
    eps1: float = 1e-5  # mean field
    eps2: float = 1e-6  # policy coordinates
    eps3: float = 1e-6  # primary policy coordinates
    gamma1: float = 0.5  # initial damping of the mean-field update
    gamma2: float = 1e-2  # descent step, devices
    gamma3: float = 1e-2  # descent step, primary
    fd_step: float = 1e-6  # relative finite-difference step
    max_outer: int = 200
    max_inner: int = 500
    max_passes: int = 100  # coordinate sweeps per block descent
    multi_start: int = 8
    seed: int = 0
    secondary_variant: str = "printed"

    def __post_init__(self):
        for k in ("eps1", "eps2", "eps3", "gamma1", "gamma2", "gamma3", "fd_step"):
            v = getattr(self, k)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{k} must be positive, got {v!r}")
        if self.gamma1 > 1:
            raise ValueError(f"gamma1 must be in (0, 1], got {self.gamma1!r}")
        for k in ("max_outer", "max_inner", "max_passes", "multi_start"):
            if int(getattr(self, k)) < 1:
                raise ValueError(f"{k} must be >= 1")
        if self.secondary_variant not in ("printed", "exact"):
            raise ValueError(f"secondary_variant must be 'printed' or 'exact', got {self.secondary_variant!r}")


@dataclass(frozen=True)
class CostTerms:
    """A device cost split into its parts. ``revenue`` is signed: negative
    for the primary (income), positive for a secondary (payment)."""

    transmit: float
    local: float
    aoi: float
    revenue: float = 0.0

    @property
    def total(self) -> float:
        return self.transmit + self.local + self.aoi + self.revenue

    @property
    def power(self) -> float:
        return self.transmit + self.local


@dataclass(frozen=True)
class EquilibriumResult:
    policies: tuple  # one DevicePolicy per type
    rho: float
    costs: tuple  # one CostTerms per type
    converged: bool
    residual: float  # |Psi(rho) - rho| at the returned rho
    trace: tuple = ()  # rho per outer iteration
    primary: DevicePolicy | None = None
    primary_cost: CostTerms | None = None
    iterations: int = 0
    start: int = 0  # index of the selected start
    population_cost: float = float("nan")  # type-weighted mean device cost
    extras: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class NashResult:
    policies: tuple  # one DevicePolicy per device
    costs: tuple  # one CostTerms per device
    converged: bool
    sweeps: int
    max_move: float  # max-norm policy change in the last sweep
