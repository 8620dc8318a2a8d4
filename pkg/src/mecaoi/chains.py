"""
Exact age chains enumerated from the queueing rules.

A configuration records what each server holds from the tagged device's
point of view and the freshness order of the packets that could still
lower its age:

    transmitter  F (fresh tagged), I (idle or stale), O (another
                 secondary's packet, only tracked while the edge server
                 holds a fresh tagged packet it would preempt), P (class P)
    local        F or I
    edge server  F, I or P

A transmitter packet is always fresher than the edge-server packet it
follows, so only the position of the local packet varies. Coordinates of
servers not holding a fresh tagged packet are pinned at zero (growth 0);
their completions are no-ops. The result is a transition table in the
same row format as the printed ones, so it runs through the same solver.

``kind`` selects the discipline:

``"equitable"``  exogenous stream ``le`` preempts at the edge server.
``"primary"``    no exogenous traffic.
``"secondary"``  ``le`` (other secondaries) and ``lP`` (class P) arrive at
                 the shared transmitter; class P preempts everything and
                 blocks tagged arrivals at both transmitter and edge server.
"""

from __future__ import annotations

from collections import deque

_COORD = {"T": 1, "L": 2, "ES": 3}
_LABELS = {
    "equitable": ("lp", "lq", "le", "mu1", "mu2", "mu3"),
    "primary": ("lp", "lq", "mu1", "mu2", "mu3"),
    "secondary": ("lp", "lq", "le", "lP", "mu1", "mu2", "mu3"),
}


def _canon(tc, ec, order):
    if tc == "O" and ec != "F":
        tc = "I"
    return (tc, ec, tuple(order))


def _drop(order, names):
    return [n for n in order if n not in names]


def _older_than(order, name):
    return order[order.index(name) + 1:]


def _step(kind, state, label):
    """Next configuration and reset map, or None for a no-op."""
    tc, ec, order = state
    order = list(order)
    reset = {0: 0}
    for n in order:
        reset[_COORD[n]] = _COORD[n]

    def done(tc2, ec2, order2, monitor=0):
        reset[0] = monitor
        for n, k in _COORD.items():
            if n not in order2:
                reset[k] = None
        r = tuple(reset.get(k) for k in range(4))
        return _canon(tc2, ec2, order2), r

    if label == "lp":
        reset[2] = None
        return done(tc, ec, ["L"] + _drop(order, ["L"]))
    if label == "lq":
        if tc == "P":
            return None
        reset[1] = None
        return done("F", ec, ["T"] + _drop(order, ["T"]))
    if label == "le":
        if kind == "equitable":
            if ec == "I":
                return None
            return done(tc, "I", _drop(order, ["ES"]))
        if tc == "P":
            return None
        return done("O", ec, _drop(order, ["T"]))
    if label == "lP":
        return done("P", ec, _drop(order, ["T"]))
    if label == "mu1":
        if tc == "I":
            return None
        if tc == "F":
            if ec == "P":
                return done("I", ec, _drop(order, ["T"]))
            reset[3] = 1
            new = ["ES" if n == "T" else n for n in order if n != "ES"]
            return done("I", "F", new)
        if tc == "O":
            return done("I", "I", _drop(order, ["ES"]))
        return done("I", "P", _drop(order, ["ES"]))
    if label == "mu2":
        if "L" not in order:
            return None
        stale = ["L"] + _older_than(order, "L")
        return done(
            "I" if "T" in stale else tc, "I" if "ES" in stale else ec,
            _drop(order, stale), monitor=2,
        )
    if label == "mu3":
        if ec == "I":
            return None
        if ec == "P":
            return done(tc, "I", order)
        stale = ["ES"] + _older_than(order, "ES")
        return done(tc, "I", _drop(order, stale), monitor=3)
    raise ValueError(f"unknown rate label {label!r}")


def _describe(state):
    tc, ec, order = state
    rank = {n: i + 1 for i, n in enumerate(order)}

    def show(name, content):
        if content == "F":
            return f"{name} fresh#{rank[name]}"
        return f"{name} " + {"I": "idle", "O": "other", "P": "class P"}[content]

    lc = "F" if "L" in order else "I"
    return ", ".join([show("T", tc), show("L", lc), show("ES", ec)])


def enumerate_chain(kind: str):
    """Reachable configurations, growth vectors and transition rows.

    Exploration starts from the empty system and follows every rate label,
    so the result contains exactly the reachable states.
    """
    if kind not in _LABELS:
        raise ValueError(f"kind must be one of {tuple(_LABELS)}, got {kind!r}")
    start = _canon("I", "I", ())
    index = {start: 0}
    queue = deque([start])
    rows = []
    while queue:
        s = queue.popleft()
        for label in _LABELS[kind]:
            nxt = _step(kind, s, label)
            if nxt is None:
                continue
            t, reset = nxt
            if t not in index:
                index[t] = len(index)
                queue.append(t)
            if t == s and reset == tuple(k if k == 0 or _name(k) in s[2] else None for k in range(4)):
                continue  # identity self-loop
            rows.append((index[s], label, index[t], reset))
    states = sorted(index, key=index.get)
    growth = [[1] + [1 if n in s[2] else 0 for n in ("T", "L", "ES")] for s in states]
    labels = tuple(f"c{i + 1}: {_describe(s)}" for i, s in enumerate(states))
    return labels, growth, tuple(rows)


def _name(k):
    return {1: "T", 2: "L", 3: "ES"}[k]
