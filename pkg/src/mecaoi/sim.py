"""
Discrete-event simulation of the preemptive offloading networks.

Every server is a single preemptive server without a buffer, so a job that
starts service finishes iff its exponential service time ends before the
next job the server accepts. That makes each server a vectorized pass over
its sorted arrival stream instead of an event loop:

* LCFS-P: every arrival is accepted and preempts whatever is in service.
* LCFS-PP: class-P arrivals preempt anything; a secondary arrival is
  accepted only if no class-P job is in service at that instant.

Simultaneous events have probability zero; ties resolve with the arrival
first (strict ``<`` on the finish test), so an arrival preempts a job that
would finish at the same instant.

Topologies:

``equitable-faithful``  each device alone with its own edge server, which
    also receives a Poisson exogenous stream at ``lambda_e``.
``equitable-full``      all devices share one edge server; interference is
    the actual cross traffic.
``priority-faithful``   each device alone: a secondary sees Poisson class-P
    (``lambda_P_bar``) and other-secondary (``lambda_e``) streams at the
    shared transmitter; the primary sees secondary load ``spec.lambda_s``.
``priority-full``       device 0 is the primary, the rest are secondaries
    sharing the primary's transmitter and the edge server.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .busy import t_local, t_primary_tx, t_secondary_tx, t_transmit
from .models import EquitableRates, PrimaryRates, SecondaryRates

TOPOLOGIES = ("equitable-full", "equitable-faithful", "priority-full", "priority-faithful")

# stream keys for per-device random substreams
_ARRIVAL, _ROUTE, _LOCAL, _TX, _EDGE, _EXO, _EXO_P = range(7)
_SHARED = 2**31 - 1


class DegenerateEstimateError(RuntimeError):
    """A device had no delivered packets, so its AoI is undefined."""


@dataclass(frozen=True)
class NetworkSpec:
    topology: str
    devices: tuple
    horizon: float
    seed: int = 0
    lambda_s: float = 0.0  # secondary load at the primary's transmitter (priority-faithful)
    warmup: float = 0.05
    n_batches: int = 50

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be > 0, got {self.horizon!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0 <= self.warmup < 1:
            raise ValueError(f"warmup must be in [0, 1), got {self.warmup!r}")
        if self.n_batches < 2:
            raise ValueError("n_batches must be at least 2")
        if self.lambda_s < 0:
            raise ValueError(f"lambda_s must be >= 0, got {self.lambda_s!r}")
        if not self.devices:
            raise ValueError("devices must be non-empty")
        if self.topology.startswith("equitable"):
            for d in self.devices:
                if not isinstance(d, EquitableRates):
                    raise ValueError(f"{self.topology} devices must be EquitableRates")
            if self.topology == "equitable-full" and len({d.mu3 for d in self.devices}) > 1:
                raise ValueError("equitable-full devices must share one mu3")
        elif self.topology == "priority-full":
            if not isinstance(self.devices[0], PrimaryRates) or not all(
                isinstance(d, SecondaryRates) for d in self.devices[1:]
            ):
                raise ValueError("priority-full devices are one PrimaryRates then SecondaryRates")
        else:
            for d in self.devices:
                if not isinstance(d, (PrimaryRates, SecondaryRates)):
                    raise ValueError("priority-faithful devices must be PrimaryRates or SecondaryRates")


@dataclass(frozen=True)
class SimEstimate:
    """Per-device AoI estimates and per-server busy fractions.

    ``busy`` and ``busy_ci3sigma`` are keyed by server name, e.g. ``"L0"``,
    ``"T0"``, ``"ES"``, ``"TP:P"`` (class-P share of the primary's
    transmitter) and ``"TP:S"`` (secondary share).
    """

    aoi: tuple
    ci95: tuple
    ci3sigma: tuple
    busy: dict = field(compare=True)
    busy_ci3sigma: dict = field(compare=True)
    deliveries: tuple
    seed: int


@dataclass(frozen=True)
class BusyComparison:
    server: str
    simulated: float
    ci3sigma: float
    analytic: float


# --------------------------------------------------------------------- streams

def _rng(seed: int, *key: int) -> np.random.Generator:
    # fixed key derivation: substream (device, purpose) never depends on N
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _poisson(rng, rate: float, horizon: float) -> np.ndarray:
    if rate <= 0:
        return np.empty(0)
    mean = rate * horizon
    n = int(mean + 8.0 * np.sqrt(mean) + 16)
    t = np.cumsum(rng.exponential(1.0 / rate, n))
    while t[-1] < horizon:
        t = np.concatenate([t, t[-1] + np.cumsum(rng.exponential(1.0 / rate, n))])
    return t[: np.searchsorted(t, horizon)]


@dataclass
class _Jobs:
    """A stream of jobs: arrival time, generation time, owner and class."""

    t: np.ndarray
    gen: np.ndarray
    owner: np.ndarray
    prio: np.ndarray

    @classmethod
    def fresh(cls, times, owner, prio=False):
        n = len(times)
        return cls(times, times, np.full(n, owner, dtype=np.int64), np.full(n, prio))

    @classmethod
    def merge(cls, parts):
        t = np.concatenate([p.t for p in parts])
        order = np.argsort(t, kind="stable")
        return cls(
            t[order],
            np.concatenate([p.gen for p in parts])[order],
            np.concatenate([p.owner for p in parts])[order],
            np.concatenate([p.prio for p in parts])[order],
        )

    def take(self, idx):
        return _Jobs(self.t[idx], self.gen[idx], self.owner[idx], self.prio[idx])


@dataclass
class _Served:
    out: _Jobs  # completed jobs, times set to departure
    start: np.ndarray  # busy intervals of accepted jobs
    end: np.ndarray
    prio: np.ndarray


def _serve(jobs: _Jobs, rate: float, rng, horizon: float, priority: bool) -> _Served:
    """One preemptive single server (LCFS-P, or LCFS-PP if ``priority``)."""
    n = len(jobs.t)
    service = rng.exponential(1.0 / rate, n)
    if priority and n:
        idx = np.where(jobs.prio, np.arange(n), -1)
        last = np.maximum.accumulate(idx)
        p_end = np.where(last >= 0, jobs.t[last] + service[np.maximum(last, 0)], -np.inf)
        keep = np.flatnonzero(jobs.prio | (p_end <= jobs.t))
    else:
        keep = np.arange(n)
    a = jobs.t[keep]
    fin = a + service[keep]
    nxt = np.append(a[1:], np.inf)
    done = (fin < nxt) & (fin <= horizon)
    end = np.minimum(np.minimum(fin, nxt), horizon)
    out = jobs.take(keep[done])
    out.t = fin[done]
    return _Served(out, a, end, jobs.prio[keep])


def _split(rng_arr, rng_route, lam, p, horizon):
    arr = _poisson(rng_arr, lam, horizon)
    local = rng_route.random(len(arr)) < p
    return arr[local], arr[~local]


# ------------------------------------------------------------------ estimators

def _batches(spec: NetworkSpec):
    lo = spec.warmup * spec.horizon
    return np.linspace(lo, spec.horizon, spec.n_batches + 1)


def _summarize(batch_means: np.ndarray):
    nb = len(batch_means)
    se = batch_means.std(ddof=1) / np.sqrt(nb)
    return float(batch_means.mean()), float(stats.t.ppf(0.975, nb - 1) * se), float(3.0 * se)


def _age_batches(times, gens, edges):
    """Batch averages of the sawtooth ``t - max(gen delivered by t)``.

    The monitor starts fresh at time 0. Stale deliveries leave the running
    maximum unchanged, so they never raise the age.
    """
    order = np.argsort(times, kind="stable")
    d = np.concatenate([[0.0], times[order]])
    g = np.maximum.accumulate(np.concatenate([[0.0], gens[order]]))
    seg_end = np.append(d[1:], np.inf)
    whole = 0.5 * ((seg_end[:-1] - g[:-1]) ** 2 - (d[:-1] - g[:-1]) ** 2)
    cum = np.concatenate([[0.0], np.cumsum(whole)])
    k = np.searchsorted(d, edges, side="right") - 1
    area = cum[k] + 0.5 * ((edges - g[k]) ** 2 - (d[k] - g[k]) ** 2)
    return np.diff(area) / np.diff(edges)


def _busy_batches(start, end, edges):
    """Batch averages of the indicator of a union of disjoint sorted intervals."""
    if len(start) == 0:
        return np.zeros(len(edges) - 1)
    cum = np.concatenate([[0.0], np.cumsum(end - start)])
    k = np.searchsorted(start, edges, side="right") - 1
    ks = np.maximum(k, 0)
    covered = np.where(k >= 0, cum[ks] + np.clip(edges - start[ks], 0.0, end[ks] - start[ks]), 0.0)
    return np.diff(covered) / np.diff(edges)


class _Recorder:
    def __init__(self, spec: NetworkSpec):
        self.edges = _batches(spec)
        self.busy: dict[str, tuple[float, float]] = {}
        self.deliveries: dict[int, list] = {}

    def server(self, name, start, end):
        mean, _, ci3 = _summarize(_busy_batches(start, end, self.edges))
        self.busy[name] = (mean, ci3)

    def served(self, name, s: _Served, split=False):
        if split:
            self.server(name + ":P", s.start[s.prio], s.end[s.prio])
            self.server(name + ":S", s.start[~s.prio], s.end[~s.prio])
        else:
            self.server(name, s.start, s.end)

    def deliver(self, owner, jobs: _Jobs):
        mask = jobs.owner == owner
        self.deliveries.setdefault(owner, []).append((jobs.t[mask], jobs.gen[mask]))


# ------------------------------------------------------------------ topologies

def _equitable(spec: NetworkSpec, rec: _Recorder, shared_es: bool):
    H, seed = spec.horizon, spec.seed
    to_es = []
    for i, d in enumerate(spec.devices):
        loc, off = _split(_rng(seed, i, _ARRIVAL), _rng(seed, i, _ROUTE), d.lam, d.p, H)
        s_l = _serve(_Jobs.fresh(loc, i), d.mu2, _rng(seed, i, _LOCAL), H, False)
        s_t = _serve(_Jobs.fresh(off, i), d.mu1, _rng(seed, i, _TX), H, False)
        rec.served(f"L{i}", s_l)
        rec.served(f"T{i}", s_t)
        rec.deliver(i, s_l.out)
        if shared_es:
            to_es.append(s_t.out)
            continue
        exo = _Jobs.fresh(_poisson(_rng(seed, i, _EXO), d.lambda_e, H), -1)
        s_e = _serve(_Jobs.merge([s_t.out, exo]), d.mu3, _rng(seed, i, _EDGE), H, False)
        rec.served(f"ES{i}", s_e)
        rec.deliver(i, s_e.out)
    if shared_es:
        s_e = _serve(_Jobs.merge(to_es), spec.devices[0].mu3, _rng(seed, _SHARED, _EDGE), H, False)
        rec.served("ES", s_e)
        for i in range(len(spec.devices)):
            rec.deliver(i, s_e.out)


def _priority_chain(spec, rec, tp_jobs, mu1, mu3, tag, key):
    H, seed = spec.horizon, spec.seed
    s_tp = _serve(_Jobs.merge(tp_jobs), mu1, _rng(seed, key, _TX), H, True)
    s_es = _serve(s_tp.out, mu3, _rng(seed, key, _EDGE), H, True)
    rec.served("TP" + tag, s_tp, split=True)
    rec.served("ES" + tag, s_es)
    return s_es.out


def _local(spec, rec, i, lam, p, mu2):
    H, seed = spec.horizon, spec.seed
    loc, off = _split(_rng(seed, i, _ARRIVAL), _rng(seed, i, _ROUTE), lam, p, H)
    s_l = _serve(_Jobs.fresh(loc, i), mu2, _rng(seed, i, _LOCAL), H, False)
    rec.served(f"L{i}", s_l)
    rec.deliver(i, s_l.out)
    return off


def _priority_faithful(spec: NetworkSpec, rec: _Recorder):
    H, seed = spec.horizon, spec.seed
    for i, d in enumerate(spec.devices):
        if isinstance(d, PrimaryRates):
            off = _local(spec, rec, i, d.lam_P, d.p_P, d.mu2P)
            sec = _poisson(_rng(seed, i, _EXO), spec.lambda_s, H)
            jobs = [_Jobs.fresh(off, i, True), _Jobs.fresh(sec, -1, False)]
            out = _priority_chain(spec, rec, jobs, d.mu1P, d.mu3, str(i), i)
        else:
            off = _local(spec, rec, i, d.lam, d.p, d.mu2)
            other = _poisson(_rng(seed, i, _EXO), d.lambda_e, H)
            prim = _poisson(_rng(seed, i, _EXO_P), d.lambda_P_bar, H)
            jobs = [
                _Jobs.fresh(off, i, False),
                _Jobs.fresh(other, -1, False),
                _Jobs.fresh(prim, -2, True),
            ]
            out = _priority_chain(spec, rec, jobs, d.mu1, d.mu3, str(i), i)
        rec.deliver(i, out)


def _priority_full(spec: NetworkSpec, rec: _Recorder):
    prim = spec.devices[0]
    jobs = [_Jobs.fresh(_local(spec, rec, 0, prim.lam_P, prim.p_P, prim.mu2P), 0, True)]
    for i, d in enumerate(spec.devices[1:], start=1):
        jobs.append(_Jobs.fresh(_local(spec, rec, i, d.lam, d.p, d.mu2), i, False))
    out = _priority_chain(spec, rec, jobs, prim.mu1P, prim.mu3, "", _SHARED)
    for i in range(len(spec.devices)):
        rec.deliver(i, out)


def simulate(spec: NetworkSpec) -> SimEstimate:
    """Run one replication; deterministic given ``spec`` (including its seed)."""
    rec = _Recorder(spec)
    if spec.topology == "equitable-faithful":
        _equitable(spec, rec, shared_es=False)
    elif spec.topology == "equitable-full":
        _equitable(spec, rec, shared_es=True)
    elif spec.topology == "priority-faithful":
        _priority_faithful(spec, rec)
    else:
        _priority_full(spec, rec)

    aoi, ci95, ci3, counts = [], [], [], []
    for i in range(len(spec.devices)):
        parts = rec.deliveries.get(i, [])
        times = np.concatenate([t for t, _ in parts]) if parts else np.empty(0)
        gens = np.concatenate([g for _, g in parts]) if parts else np.empty(0)
        if len(times) == 0:
            raise DegenerateEstimateError(
                f"device {i} had no deliveries over the horizon; "
                "increase the horizon or check its rates"
            )
        m, h95, h3 = _summarize(_age_batches(times, gens, rec.edges))
        aoi.append(m)
        ci95.append(h95)
        ci3.append(h3)
        counts.append(int(len(times)))
    return SimEstimate(
        aoi=tuple(aoi),
        ci95=tuple(ci95),
        ci3sigma=tuple(ci3),
        busy={k: v[0] for k, v in rec.busy.items()},
        busy_ci3sigma={k: v[1] for k, v in rec.busy.items()},
        deliveries=tuple(counts),
        seed=spec.seed,
    )


# ------------------------------------------------------------ busy fractions

def busy_fraction_check(spec: NetworkSpec) -> list[BusyComparison]:
    """Simulated against closed-form busy fractions for every server that has one."""
    est = simulate(spec)
    rows = []

    def add(name, analytic):
        rows.append(BusyComparison(name, est.busy[name], est.busy_ci3sigma[name], float(analytic)))

    if spec.topology.startswith("equitable"):
        for i, d in enumerate(spec.devices):
            add(f"L{i}", t_local(d.lam, d.p, d.mu2))
            add(f"T{i}", t_transmit(d.lam, d.p, d.mu1))
        return rows
    if spec.topology == "priority-full":
        prim = spec.devices[0]
        lam_s = sum(d.lam * (1.0 - d.p) for d in spec.devices[1:])
        add("L0", t_local(prim.lam_P, prim.p_P, prim.mu2P))
        for i, d in enumerate(spec.devices[1:], start=1):
            add(f"L{i}", t_local(d.lam, d.p, d.mu2))
        add("TP:P", t_primary_tx(prim.lam_P, prim.p_P, prim.mu1P))
        add("TP:S", t_secondary_tx(prim.lam_P, prim.p_P, prim.mu1P, lam_s))
        return rows
    for i, d in enumerate(spec.devices):
        if isinstance(d, PrimaryRates):
            add(f"L{i}", t_local(d.lam_P, d.p_P, d.mu2P))
            add(f"TP{i}:P", t_primary_tx(d.lam_P, d.p_P, d.mu1P))
            add(f"TP{i}:S", t_secondary_tx(d.lam_P, d.p_P, d.mu1P, spec.lambda_s))
        else:
            # the injected class-P stream plays the primary's offload stream
            lam_s = d.lambda_e + d.lam * (1.0 - d.p)
            add(f"L{i}", t_local(d.lam, d.p, d.mu2))
            add(f"TP{i}:P", d.lambda_P_bar / (d.lambda_P_bar + d.mu1) if d.lambda_P_bar > 0 else 0.0)
            add(f"TP{i}:S", t_secondary_tx(d.lambda_P_bar, 0.0, d.mu1, lam_s))
    return rows


def horizon_for(spec: NetworkSpec, deliveries: int, pilot: float = 5000.0) -> float:
    """Horizon at which every device is expected to reach ``deliveries``.

    Runs a short pilot to estimate the slowest device's delivery rate and
    adds a 10% margin.
    """
    est = simulate(NetworkSpec(spec.topology, spec.devices, pilot, spec.seed ^ 0x5EED, spec.lambda_s))
    rate = min(est.deliveries) / pilot
    return 1.1 * deliveries / rate
