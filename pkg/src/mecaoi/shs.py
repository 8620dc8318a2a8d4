"""
Piecewise-linear stochastic hybrid systems for average age of information.

A model is a finite-state Markov chain whose transitions carry a linear
reset of the age vector ``x' = x A``. The monitor (the device receiving
processed tasks) always has age index 0. Average AoI follows from two
dense linear solves: the stationary distribution of the chain and the
stationary correlation vectors ``v_s = E[x 1{s(t) = s}]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import lapack
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

MAX_CONDITION = 1e12


class SingularModelError(ValueError):
    """Raised when a linear system is singular or too ill-conditioned."""

    def __init__(self, what: str, condition: float):
        super().__init__(
            f"{what} system is singular or ill-conditioned "
            f"(condition estimate {condition:.3g}, limit {MAX_CONDITION:.0e}); "
            "the chain is not ergodic or the age process is never reset"
        )
        self.condition = condition


@dataclass(frozen=True)
class Transition:
    """One row of a transition table.

    ``reset[k]`` names the coordinate of x copied into x'_k, or None when
    x'_k is reset to zero.
    """

    source: int
    rate: float
    target: int
    reset: tuple

    def matrix(self, n_ages: int) -> np.ndarray:
        """Binary matrix A with ``x' = x @ A``."""
        a = np.zeros((n_ages, n_ages))
        for k, j in enumerate(self.reset):
            if j is not None:
                a[j, k] = 1.0
        return a


def _reset_columns(resets: Sequence[tuple], n_ages: int) -> np.ndarray:
    cols = np.array([[-1 if j is None else j for j in r] for r in resets], dtype=np.intp)
    return cols.reshape(-1, n_ages)


class ShsModel:
    """Finite-state SHS: states, per-state growth vectors and transitions.

    ``n_servers`` excludes the monitor, so age vectors have length
    ``n_servers + 1``. Array attributes are read-only.
    """

    def __init__(
        self,
        n_servers: int,
        states: Sequence[str],
        growth,
        transitions: Sequence[Transition],
    ):
        m, n_ages = len(states), n_servers + 1
        growth = np.array(growth, dtype=float)
        if growth.shape != (m, n_ages):
            raise ValueError(f"growth must have shape {(m, n_ages)}, got {growth.shape}")
        if not np.all((growth == 0) | (growth == 1)):
            raise ValueError("growth entries must be 0 or 1")
        if not np.all(growth[:, 0] == 1):
            raise ValueError("monitor age must grow in every state")
        has_out = np.zeros(m, dtype=bool)
        for t in transitions:
            if not (0 <= t.source < m and 0 <= t.target < m):
                raise ValueError(f"{t} references an unknown state")
            if not (np.isfinite(t.rate) and t.rate >= 0):
                raise ValueError(f"transition rate must be finite and >= 0, got {t.rate}")
            if len(t.reset) != n_ages:
                raise ValueError(f"reset map {t.reset} must have length {n_ages}")
            if any(j is not None and not 0 <= j < n_ages for j in t.reset):
                raise ValueError(f"reset map {t.reset} selects an unknown coordinate")
            has_out[t.source] = True
        if not has_out.all():
            missing = [states[i] for i in np.flatnonzero(~has_out)]
            raise ValueError(f"states without outgoing transitions: {missing}")
        self._init(
            n_servers,
            tuple(states),
            growth,
            np.array([t.source for t in transitions], dtype=np.intp),
            np.array([t.target for t in transitions], dtype=np.intp),
            np.array([t.rate for t in transitions], dtype=float),
            _reset_columns([t.reset for t in transitions], n_ages),
        )

    def _init(self, n_servers, states, growth, src, dst, rate, cols, support=None):
        for a in (growth, src, dst, rate, cols):
            a.setflags(write=False)
        self.n_servers = n_servers
        self.states = states
        self.growth = growth
        self.src, self.dst, self.rate, self.cols = src, dst, rate, cols
        self._support = support

    @classmethod
    def _trusted(cls, n_servers, states, growth, src, dst, rate, cols, support=None):
        obj = cls.__new__(cls)
        obj._init(n_servers, states, growth, src, dst, rate, cols, support)
        return obj

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_ages(self) -> int:
        return self.n_servers + 1

    @property
    def transitions(self) -> tuple[Transition, ...]:
        return tuple(
            Transition(int(s), float(r), int(d), tuple(None if j < 0 else int(j) for j in c))
            for s, r, d, c in zip(self.src, self.rate, self.dst, self.cols)
        )

    def reset_matrices(self) -> np.ndarray:
        """Stack of binary reset matrices, one per transition."""
        n = self.n_ages
        mats = np.zeros((len(self.src), n, n))
        ell, k = np.nonzero(self.cols >= 0)
        mats[ell, self.cols[ell, k], k] = 1.0
        return mats

    def generator(self) -> np.ndarray:
        """CTMC generator Q; self-loops cancel out."""
        m = self.n_states
        q = np.zeros((m, m))
        np.add.at(q, (self.src, self.dst), self.rate)
        np.fill_diagonal(q, 0.0)
        q -= np.diag(q.sum(axis=1))
        return q

    def support(self) -> np.ndarray:
        """Mask of the recurrent class that carries all stationary mass."""
        if self._support is None:
            self._support = recurrent_class(self.n_states, self.src, self.dst, self.rate)
        return self._support

    def scaled(self, c: float) -> "ShsModel":
        """Same model with every rate multiplied by ``c`` (time rescaling)."""
        return ShsModel._trusted(
            self.n_servers, self.states, self.growth, self.src, self.dst,
            self.rate * c, self.cols, self._support,
        )


def recurrent_class(m: int, src, dst, rate) -> np.ndarray:
    """The single reachable closed class of the chain.

    Closed classes with no positive inflow from outside are unreachable and
    are discarded; exactly one closed class must remain. Every other state
    is transient and gets zero stationary mass.
    """
    pos = (rate > 0) & (src != dst)
    s, d = src[pos], dst[pos]
    graph = csr_matrix((np.ones(len(s)), (s, d)), shape=(m, m))
    n_comp, comp = connected_components(graph, directed=True, connection="strong")
    cross = comp[s] != comp[d]
    closed = np.ones(n_comp, dtype=bool)
    closed[comp[s[cross]]] = False
    fed = np.zeros(n_comp, dtype=bool)
    fed[comp[d[cross]]] = True
    candidates = np.flatnonzero(closed)
    if len(candidates) > 1:
        candidates = candidates[fed[candidates]]
    if len(candidates) != 1:
        raise SingularModelError("steady-state", np.inf)
    live = comp == candidates[0]
    live.setflags(write=False)
    return live


@dataclass(frozen=True)
class SteadyState:
    pi: np.ndarray

    def __post_init__(self):
        if np.any(self.pi < 0) or abs(self.pi.sum() - 1.0) > 1e-12:
            raise ValueError("steady state must be a probability vector")


@dataclass(frozen=True)
class CorrelationVector:
    v: np.ndarray  # shape (n_states, n_ages)

    @property
    def average_age(self) -> float:
        return float(self.v[:, 0].sum())


def _lu_solve(a: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    # dense LU with partial pivoting and a 1-norm condition estimate
    lu, piv, info = lapack.dgetrf(a)
    if info > 0:
        raise SingularModelError(what, np.inf)
    anorm = np.abs(a).sum(axis=0).max()
    rcond, _ = lapack.dgecon(lu, anorm, norm="1")
    if not rcond * MAX_CONDITION >= 1.0:
        raise SingularModelError(what, 1.0 / rcond if rcond > 0 else np.inf)
    x, _ = lapack.dgetrs(lu, piv, b)
    return x


def solve_steady_state(model: ShsModel) -> SteadyState:
    """Stationary distribution from global balance plus normalization."""
    live = model.support()
    q = model.generator()[np.ix_(live, live)]
    q -= np.diag(q.sum(axis=1))
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(len(a))
    b[-1] = 1.0
    sub = np.clip(_lu_solve(a, b, "steady-state"), 0.0, None)
    pi = np.zeros(model.n_states)
    pi[live] = sub / sub.sum()
    return SteadyState(pi)


def correlation_matrix(model: ShsModel) -> np.ndarray:
    """Matrix M with ``M @ v.ravel() = (u * pi[:, None]).ravel()``."""
    m, n = model.n_states, model.n_ages
    out_rate = np.bincount(model.src, weights=model.rate, minlength=m)
    mat = np.diag(np.repeat(out_rate, n))
    ell, k = np.nonzero(model.cols >= 0)
    rows = model.dst[ell] * n + k
    cols = model.src[ell] * n + model.cols[ell, k]
    np.add.at(mat, (rows, cols), -model.rate[ell])
    return mat


def solve_correlation(model: ShsModel, steady: SteadyState) -> CorrelationVector:
    """Solve ``v_s sum_out q = u_s pi_s + sum_in q v_src A`` on the support.

    Off the recurrent class v_s is zero, so those rows are not solved.
    """
    live = model.support()
    n = model.n_ages
    idx = (np.flatnonzero(live)[:, None] * n + np.arange(n)).ravel()
    mat = correlation_matrix(model)[np.ix_(idx, idx)]
    rhs = (model.growth * steady.pi[:, None]).ravel()[idx]
    v = np.zeros(model.n_states * n)
    v[idx] = _lu_solve(mat, rhs, "correlation")
    return CorrelationVector(v.reshape(model.n_states, n))


def average_aoi(model: ShsModel) -> float:
    """Average monitor age, the sum over states of ``v_s0``."""
    delta = solve_correlation(model, solve_steady_state(model)).average_age
    if not (np.isfinite(delta) and delta > 0):
        raise SingularModelError("correlation", np.inf)
    return delta


class TableTemplate:
    """A symbolic transition table of rows ``(src, rate_label, dst, reset)``.

    Index arrays are built once; ``model(rates)`` only fills in the rate
    vector, which keeps repeated AoI evaluation inside the optimizers cheap.
    """

    def __init__(self, states, growth, table, n_servers: int = 3):
        self.states = tuple(states)
        self.n_servers = n_servers
        self.table = tuple(table)
        self.labels = tuple(sorted({row[1] for row in table}))
        self._label_idx = np.array([self.labels.index(row[1]) for row in table], dtype=np.intp)
        # structural validation through the public constructor
        probe = ShsModel(
            n_servers, self.states, growth,
            [Transition(s, 1.0, d, r) for s, _, d, r in table],
        )
        self._growth = probe.growth
        self._src, self._dst, self._cols = probe.src, probe.dst, probe.cols
        self._support_cache: dict[bytes, tuple] = {}
        # linear maps from label values to flattened Q and correlation matrix
        m, n, n_lab = len(self.states), n_servers + 1, len(self.labels)
        onehot = np.zeros((len(table), n_lab))
        onehot[np.arange(len(table)), self._label_idx] = 1.0
        bq = np.zeros((m * m, len(table)))
        bm = np.zeros(((m * n) ** 2, len(table)))
        for t, (s, d, c) in enumerate(zip(self._src, self._dst, self._cols)):
            if s != d:
                bq[s * m + d, t] += 1.0
                bq[s * m + s, t] -= 1.0
            for k in range(n):
                i = s * n + k
                bm[i * m * n + i, t] += 1.0
                if c[k] >= 0:
                    bm[(d * n + k) * m * n + s * n + c[k], t] -= 1.0
        self._bq = bq @ onehot
        self._bm = bm @ onehot

    def __len__(self):
        return len(self.table)

    def model(self, rates: Mapping[str, float]) -> ShsModel:
        values = self._values(rates)
        return ShsModel._trusted(
            self.n_servers, self.states, self._growth, self._src, self._dst,
            values[self._label_idx], self._cols, self._support_for(values)[0],
        )

    def _values(self, rates):
        values = np.array([float(rates[k]) for k in self.labels])
        if not np.all(np.isfinite(values) & (values >= 0)):
            raise ValueError(f"rates must be finite and >= 0, got {dict(zip(self.labels, values))}")
        return values

    def _support_for(self, values):
        key = (values > 0).tobytes()
        hit = self._support_cache.get(key)
        if hit is None:
            live = recurrent_class(len(self.states), self._src, self._dst, values[self._label_idx])
            n = self.n_servers + 1
            sidx = np.flatnonzero(live)
            vidx = (sidx[:, None] * n + np.arange(n)).ravel()
            hit = (live, np.ix_(sidx, sidx), np.ix_(vidx, vidx), vidx)
            self._support_cache[key] = hit
        return hit

    def average_aoi(self, rates: Mapping[str, float]) -> float:
        """Same result as ``average_aoi(self.model(rates))`` without building a model."""
        values = self._values(rates)
        live, qix, vix, vidx = self._support_for(values)
        m, n = len(self.states), self.n_servers + 1
        q = (self._bq @ values).reshape(m, m)[qix]
        q -= np.diag(q.sum(axis=1))
        a = q.T.copy()
        a[-1, :] = 1.0
        b = np.zeros(len(a))
        b[-1] = 1.0
        sub = np.clip(_lu_solve(a, b, "steady-state"), 0.0, None)
        pi = np.zeros(m)
        pi[live] = sub / sub.sum()
        mat = (self._bm @ values).reshape(m * n, m * n)[vix]
        rhs = (self._growth * pi[:, None]).ravel()[vidx]
        v = _lu_solve(mat, rhs, "correlation")
        delta = float(v[0::n].sum())
        if not (np.isfinite(delta) and delta > 0):
            raise SingularModelError("correlation", np.inf)
        return delta
