"""Experiment configuration, built-in presets and the runner behind ``mec``.

A configuration is a nested mapping (written as YAML on disk):

.. code-block:: yaml

    experiment: sweep            # aoi | simulate | mfe | nash | mm-mfe | sweep | validate
    seed: 0
    system: {N: 60, mu3: 15.0}
    types:
      - {name: a, weight: 1.0, lam: 10.0, V: 10.0, eta: 0.02, P_max: 1.0, f_max: 0.8}
    solver: {multi_start: 8}
    sweep:
      kind: mfe                  # point solver for each sweep coordinate
      axes:
        - {name: V, values: [1, 10, 100]}

Sweep axis names: ``N``, ``mu3``, ``alpha``, ``rho`` (system); ``lam``,
``V``, ``eta``, ``P_max``, ``f_max`` (applied to every type); ``lam_P``,
``V_P``, ``eta_P``, ``P_max_P``, ``f_max_P`` (primary).
"""

from __future__ import annotations

import copy
import hashlib
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, fields

import numpy as np
import yaml

from . import __version__
from .busy import t_primary_tx
from .game import DevicePolicy, PrimaryProfile, SolverConfig, TypeProfile
from .models import (
    EquitableRates, PrimaryRates, SecondaryRates, equitable_aoi, primary_aoi, secondary_aoi,
)
from .results import ResultTable
from .sim import NetworkSpec, horizon_for, simulate
from .solvers import (
    finite_game_costs, mf_best_response, mfe_solve, mm_mfe_solve, nash_solve, solo_primary,
)

EXPERIMENTS = ("aoi", "simulate", "mfe", "nash", "mm-mfe", "sweep", "validate")
POINT_KINDS = ("mf-response", "mfe", "nash", "ne-vs-mfe", "mm-mfe", "utilization")
# point kinds each subcommand may run; "sweep" runs any of them
SUBCOMMAND_KINDS = {
    "mfe": ("mfe", "mf-response", "ne-vs-mfe"),
    "nash": ("nash", "ne-vs-mfe"),
    "mm-mfe": ("mm-mfe", "utilization"),
    "sweep": POINT_KINDS,
}
SYSTEM_AXES = ("N", "mu3", "alpha", "rho")
TYPE_AXES = ("lam", "V", "eta", "P_max", "f_max")
PRIMARY_AXES = {"lam_P": "lam_P", "V_P": "V", "eta_P": "eta", "P_max_P": "P_max", "f_max_P": "f_max"}

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NONCONVERGED, EXIT_DEGENERATE = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    """The configuration does not parse or does not validate."""


# -------------------------------------------------------------------- config

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a mapping at top level")
    return cfg


def _axis_values(axis) -> list:
    if not isinstance(axis, dict) or "name" not in axis:
        raise ConfigError(f"sweep axis must be a mapping with a name, got {axis!r}")
    name = axis["name"]
    if name not in SYSTEM_AXES + TYPE_AXES + tuple(PRIMARY_AXES):
        raise ConfigError(f"unknown sweep parameter {name!r}")
    if "values" in axis:
        values = list(axis["values"])
    elif {"start", "stop", "step"} <= axis.keys():
        start, stop, step = (float(axis[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise ConfigError(f"sweep axis {name!r}: step must be > 0")
        n = math.floor((stop - start) / step + 1e-9) + 1
        values = [start + i * step for i in range(max(n, 0))]
        # tidy binary noise so coordinates print as written
        values = [float(round(v, 12)) for v in values]
    else:
        raise ConfigError(f"sweep axis {name!r} needs 'values' or 'start/stop/step'")
    if not values:
        raise ConfigError(f"sweep axis {name!r} has an empty range")
    return values


def normalize(cfg: dict, subcommand: str | None = None) -> dict:
    """Validate ``cfg`` and fill defaults. Raises ConfigError."""
    cfg = copy.deepcopy(cfg)
    exp = cfg.get("experiment", subcommand)
    if subcommand is not None and exp != subcommand:
        raise ConfigError(f"config is a {exp!r} experiment, not {subcommand!r}")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    cfg["experiment"] = exp
    cfg.setdefault("seed", 0)
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg['seed']!r}")
    cfg.setdefault("jobs", 1)
    if not isinstance(cfg["jobs"], int) or cfg["jobs"] < 1:
        raise ConfigError(f"jobs must be a positive integer, got {cfg['jobs']!r}")
    try:
        solver = SolverConfig(**{**cfg.get("solver", {}), "seed": cfg["seed"]})
    except TypeError as exc:
        raise ConfigError(f"unknown solver option: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg["solver"] = {k: v for k, v in asdict(solver).items() if k != "seed"}

    if exp in SUBCOMMAND_KINDS:
        sweep = cfg.get("sweep")
        if sweep is None:
            if exp == "sweep":
                raise ConfigError("a sweep experiment needs a 'sweep' section")
            sweep = {"kind": exp, "axes": []}
        kind = sweep.get("kind")
        if kind not in SUBCOMMAND_KINDS[exp]:
            raise ConfigError(f"{exp!r} cannot run sweep kind {kind!r}; allowed {SUBCOMMAND_KINDS[exp]}")
        axes = sweep.get("axes", [])
        if exp == "sweep" and not axes:
            raise ConfigError("a sweep needs at least one axis")
        sweep["axes"] = [{"name": a["name"] if isinstance(a, dict) else None, "values": _axis_values(a)} for a in axes]
        names = [a["name"] for a in sweep["axes"]]
        if len(set(names)) != len(names):
            raise ConfigError(f"repeated sweep axis in {names}")
        cfg["sweep"] = sweep
        _check_point_inputs(cfg, kind)
    elif exp == "aoi":
        _check_aoi(cfg.get("aoi"))
    elif exp == "simulate":
        _build_sim(cfg.get("simulate"), cfg["seed"])
    elif exp == "validate":
        v = cfg.setdefault("validate", {})
        v.setdefault("deliveries", 1_000_000)
        if int(v["deliveries"]) < 1:
            raise ConfigError("validate.deliveries must be >= 1")
    return cfg


def _types(cfg) -> tuple[TypeProfile, ...]:
    raw = cfg.get("types")
    if not raw:
        raise ConfigError("config needs a non-empty 'types' list")
    try:
        types = tuple(
            TypeProfile(name=str(t.get("name", f"type{i}")), weight=float(t.get("weight", 1.0)),
                        lam=float(t["lam"]), V=float(t["V"]), eta=float(t["eta"]),
                        P_max=float(t.get("P_max", 0.0)), f_max=float(t["f_max"]))
            for i, t in enumerate(raw)
        )
    except KeyError as exc:
        raise ConfigError(f"type profile missing {exc}") from exc
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"bad type profile: {exc}") from exc
    if abs(sum(t.weight for t in types) - 1.0) > 1e-9:
        raise ConfigError("type weights must sum to 1")
    return types


def _primary(cfg) -> PrimaryProfile:
    raw = cfg.get("primary")
    if not isinstance(raw, dict):
        raise ConfigError("config needs a 'primary' section")
    try:
        return PrimaryProfile(**{k: float(v) for k, v in raw.items()})
    except TypeError as exc:
        raise ConfigError(f"bad primary section: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _system(cfg) -> dict:
    s = dict(cfg.get("system", {}))
    unknown = set(s) - set(SYSTEM_AXES)
    if unknown:
        raise ConfigError(f"unknown system parameters {sorted(unknown)}")
    return s


def _check_point_inputs(cfg, kind):
    sys_ = _system(cfg)
    _types(cfg)
    axes = {a["name"] for a in cfg["sweep"]["axes"]}
    for name in ("mu3", "N"):
        if name not in sys_ and name not in axes:
            raise ConfigError(f"system.{name} is required for {kind!r}")
    if kind == "mf-response" and "rho" not in sys_ and "rho" not in axes:
        raise ConfigError("mf-response needs system.rho or a rho axis")
    if kind in ("mm-mfe", "utilization"):
        _primary(cfg)
        if "alpha" not in sys_ and "alpha" not in axes:
            raise ConfigError(f"system.alpha is required for {kind!r}")


def config_hash(cfg: dict) -> str:
    """Hash of the normalized config, ignoring output location and worker count."""
    core = {k: v for k, v in cfg.items() if k not in ("output", "jobs", "description", "preset")}
    blob = json.dumps(core, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# -------------------------------------------------------------------- points

def _apply(cfg: dict, coords: dict) -> dict:
    """Config with sweep coordinates substituted."""
    c = copy.deepcopy(cfg)
    c.setdefault("system", {})
    for name, value in coords.items():
        if name in SYSTEM_AXES:
            c["system"][name] = value
        elif name in TYPE_AXES:
            for t in c["types"]:
                t[name] = value
        else:
            c["primary"][PRIMARY_AXES[name]] = value
    return c


def _init_policies(cfg, key, n):
    raw = (cfg.get("init") or {}).get(key)
    if raw is None:
        return None
    if key == "primary":
        return DevicePolicy.from_vector(raw)
    pols = [DevicePolicy.from_vector(v) for v in raw]
    if len(pols) == 1 and n > 1:
        pols = pols * n
    return pols


def _policy_cols(prefix, pol: DevicePolicy):
    if pol.mu1 is None:
        return {f"{prefix}p": pol.p, f"{prefix}mu2": pol.mu2}
    return {f"{prefix}p": pol.p, f"{prefix}mu1": pol.mu1, f"{prefix}mu2": pol.mu2}


def _terms_cols(prefix, c):
    return {f"{prefix}power": c.power, f"{prefix}aoi_term": c.aoi, f"{prefix}revenue": c.revenue,
            f"{prefix}cost": c.total}


def _mean(values) -> float:
    # fsum keeps the mean of equal values equal to that value
    values = list(values)
    return math.fsum(values) / len(values)


def _point(args):
    """One sweep point -> (ordered metrics dict, converged)."""
    cfg, kind, seed = args
    solver = SolverConfig(**{**cfg["solver"], "seed": seed})
    sys_ = cfg["system"]
    types = _types(cfg)
    out = {}
    if kind == "mf-response":
        t = types[0]
        pol, cost = mf_best_response(t, float(sys_["rho"]), int(sys_["N"]), float(sys_["mu3"]), solver,
                                     init=(_init_policies(cfg, "types", 1) or [None])[0])
        out.update(_policy_cols("", pol))
        out["cost"] = cost
        return out, True
    if kind == "mfe":
        r = mfe_solve(types, int(sys_["N"]), float(sys_["mu3"]), solver, init=_init_policies(cfg, "types", len(types)))
        out["rho"] = r.rho
        for t, pol, c in zip(types, r.policies, r.costs):
            pre = f"{t.name}." if len(types) > 1 else ""
            out.update(_policy_cols(pre, pol))
            out.update(_terms_cols(pre, c))
            out[f"{pre}aoi"] = c.aoi / t.V if t.V > 0 else math.nan
        out["population_cost"] = r.population_cost
        out["residual"] = r.residual
        out["iterations"] = r.iterations
        out["converged"] = r.converged
        return out, r.converged
    if kind in ("nash", "ne-vs-mfe"):
        N, mu3 = int(sys_["N"]), float(sys_["mu3"])
        devices = _devices(types, N)
        ne = nash_solve(devices, mu3, solver)
        ne_cost = _mean([c.total for c in ne.costs])
        out.update({f"ne_{k}": _mean([getattr(x, k) for x in ne.policies]) for k in ("p", "mu1", "mu2")})
        out["ne_cost"] = ne_cost
        out["ne_sweeps"] = ne.sweeps
        ok = ne.converged
        if kind == "ne-vs-mfe":
            m = mfe_solve(types, N, mu3, solver)
            by_type = {t.name: x for t, x in zip(types, m.policies)}
            pols = [by_type[d.name] for d in devices]
            mf_cost = _mean([c.total for c in finite_game_costs(devices, pols, mu3)])
            out.update({f"mfe_{k}": _mean([getattr(x, k) for x in pols]) for k in ("p", "mu1", "mu2")})
            out["mfe_rho"] = m.rho
            out["mfe_cost_finite"] = mf_cost
            out["rel_gap"] = abs(mf_cost - ne_cost) / abs(ne_cost)
            ok = ok and m.converged
        out["converged"] = ok
        return out, ok
    # priority access
    prim = _primary(cfg)
    N, mu3, alpha = int(sys_["N"]), float(sys_["mu3"]), float(sys_["alpha"])
    r = mm_mfe_solve(prim, types, N, alpha, mu3, solver,
                     init_primary=_init_policies(cfg, "primary", 1),
                     init_secondary=_init_policies(cfg, "types", len(types)))
    if kind == "utilization":
        solo, _ = solo_primary(prim, mu3, solver, init=_init_policies(cfg, "primary", 1))
        solo_t1 = t_primary_tx(prim.lam_P, solo.p, solo.mu1)
        out.update(_policy_cols("solo_P_", solo))
        out["solo_t_TP1"] = solo_t1
    out.update(_policy_cols("P_", r.primary))
    out.update(_terms_cols("P_", r.primary_cost))
    for t, pol, c in zip(types, r.policies, r.costs):
        pre = f"{t.name}." if len(types) > 1 else "S_"
        out.update(_policy_cols(pre, pol))
        out.update(_terms_cols(pre, c))
    out["rho"] = r.rho
    out["t_TP1"] = r.extras["t_TP1"]
    out["t_TP2"] = r.extras["t_TP2"]
    out["t_TP"] = r.extras["t_TP1"] + r.extras["t_TP2"]
    if kind == "utilization":
        base = out["solo_t_TP1"]
        out["utilization_gain"] = (out["t_TP"] - base) / base if base > 0 else math.nan
    out["residual"] = r.residual
    out["iterations"] = r.iterations
    out["converged"] = r.converged
    return out, r.converged


def _devices(types, N):
    """N devices split across types in proportion to their weights
    (largest remainders), type order preserved."""
    raw = [t.weight * N for t in types]
    counts = [int(math.floor(x)) for x in raw]
    for i in sorted(range(len(types)), key=lambda i: raw[i] - counts[i], reverse=True)[: N - sum(counts)]:
        counts[i] += 1
    return [t for t, n in zip(types, counts) for _ in range(n)]


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def _run_sweep(cfg) -> tuple[ResultTable, int]:
    kind = cfg["sweep"]["kind"]
    axes = cfg["sweep"]["axes"]
    names = [a["name"] for a in axes]
    grid = list(itertools.product(*[a["values"] for a in axes])) if axes else [()]
    jobs = [(_apply(cfg, dict(zip(names, pt))), kind, _point_seed(cfg["seed"], i)) for i, pt in enumerate(grid)]
    if cfg["jobs"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            results = list(pool.map(_point, jobs))
    else:
        results = [_point(j) for j in jobs]
    metric_cols = list(results[0][0])
    table = ResultTable(names + metric_cols)
    for pt, (metrics, _) in zip(grid, results):
        table.append(list(pt) + [metrics.get(c) for c in metric_cols])
    status = EXIT_OK if all(ok for _, ok in results) else EXIT_NONCONVERGED
    return table, status


# --------------------------------------------------------------- aoi / sim

_RATE_TYPES = {"equitable": EquitableRates, "primary": PrimaryRates, "secondary": SecondaryRates}


def _rates(model, raw):
    cls = _RATE_TYPES.get(model)
    if cls is None:
        raise ConfigError(f"model must be one of {tuple(_RATE_TYPES)}, got {model!r}")
    try:
        return cls(**{k: float(v) for k, v in raw.items()})
    except TypeError as exc:
        raise ConfigError(f"bad {model} rates: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _check_aoi(section):
    if not isinstance(section, dict) or "model" not in section or "rates" not in section:
        raise ConfigError("aoi experiment needs aoi.model and aoi.rates")
    if section.get("variant", "printed") not in ("printed", "exact"):
        raise ConfigError("aoi.variant must be 'printed' or 'exact'")
    return _rates(section["model"], section["rates"])


def _analytic(r, variant="printed"):
    if isinstance(r, EquitableRates):
        return equitable_aoi(r)
    if isinstance(r, PrimaryRates):
        return primary_aoi(r)
    return secondary_aoi(r, variant)


def _run_aoi(cfg):
    section = cfg["aoi"]
    r = _check_aoi(section)
    variant = section.get("variant", "printed")
    table = ResultTable(["model", "variant"] + [f.name for f in fields(r)] + ["aoi"])
    table.append([section["model"], variant] + [float(getattr(r, f.name)) for f in fields(r)] + [_analytic(r, variant)])
    return table, EXIT_OK


def _build_sim(section, seed):
    if not isinstance(section, dict) or "topology" not in section or "devices" not in section:
        raise ConfigError("simulate experiment needs simulate.topology and simulate.devices")
    devices = []
    for d in section["devices"]:
        d = dict(d)
        devices.append(_rates(d.pop("model", "equitable"), d))
    try:
        spec = NetworkSpec(section["topology"], devices, float(section.get("horizon", 1.0)), seed,
                           lambda_s=float(section.get("lambda_s", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "horizon" not in section and "deliveries" not in section:
        raise ConfigError("simulate needs a horizon or a deliveries target")
    return spec


def _run_simulate(cfg):
    section = cfg["simulate"]
    spec = _build_sim(section, cfg["seed"])
    if "deliveries" in section:
        spec = NetworkSpec(spec.topology, spec.devices, horizon_for(spec, int(section["deliveries"])),
                           spec.seed, spec.lambda_s)
    est = simulate(spec)
    table = ResultTable(["device", "model", "analytic", "simulated", "ci95", "ci3sigma", "z", "deliveries"])
    faithful = spec.topology.endswith("faithful")
    variant = section.get("variant", "exact")
    for i, d in enumerate(spec.devices):
        a = _analytic(d, variant) if faithful else math.nan
        z = (est.aoi[i] - a) / (est.ci3sigma[i] / 3) if faithful else math.nan
        model = {EquitableRates: "equitable", PrimaryRates: "primary", SecondaryRates: "secondary"}[type(d)]
        table.append([i, model, a, est.aoi[i], est.ci95[i], est.ci3sigma[i], z, est.deliveries[i]])
    return table, EXIT_OK


# Five parameter points per faithful topology; seeds are fixed per point.
VALIDATION_POINTS = {
    "equitable": [(10, .5, 1, .8, 15, 5), (3, .3, 2, 1, 4, 2), (1, .5, 1, .8, 15, 10),
                  (5, .8, 3, 2, 6, 0), (2, .1, 4, 1.5, 3, 8)],
    "primary": [(4, .5, 2, .5, 15), (2, .5, 1, .5, 15), (1, .2, 3, 1, 2), (6, .7, .8, 2, 5), (3, .4, 5, .3, 4)],
    "secondary": [(5, .5, .6, 2, 15, 10, 2), (2, .3, 1, 3, 5, 1, 1), (1, .5, .8, 2, 15, 3, .5),
                  (4, .2, 2, 5, 3, .5, 2), (3, .7, 1.5, 1, 6, 2, .2)],
}
VALIDATION_LAMBDA_S = 3.0  # secondary load injected at the primary's transmitter


def validation_rows(deliveries: int = 1_000_000, seed: int = 0):
    """Simulated against analytic AoI at every validation point.

    Yields dicts with the model, point index, analytic value, simulated
    mean, 3-sigma half-width and z-score. Secondary points are compared
    with the exact enumerated chain; the printed table's value and z are
    reported alongside.
    """
    offsets = {"equitable": 100, "primary": 200, "secondary": 300}
    for model, pts in VALIDATION_POINTS.items():
        for i, x in enumerate(pts):
            r = _RATE_TYPES[model](*x)
            topo = "equitable-faithful" if model == "equitable" else "priority-faithful"
            ls = VALIDATION_LAMBDA_S if model == "primary" else 0.0
            s_seed = seed + offsets[model] + i
            spec = NetworkSpec(topo, [r], 1.0, s_seed, lambda_s=ls)
            spec = NetworkSpec(topo, [r], horizon_for(spec, deliveries), s_seed, lambda_s=ls)
            est = simulate(spec)
            sigma = est.ci3sigma[0] / 3
            a = _analytic(r, "exact")
            row = {"model": model, "point": i, "analytic": a, "simulated": est.aoi[0],
                   "ci3sigma": est.ci3sigma[0], "z": (est.aoi[0] - a) / sigma,
                   "deliveries": est.deliveries[0]}
            if model == "secondary":
                ap = secondary_aoi(r, "printed")
                row.update(analytic_printed=ap, z_printed=(est.aoi[0] - ap) / sigma)
            else:
                row.update(analytic_printed=a, z_printed=row["z"])
            yield row


def _run_validate(cfg):
    rows = list(validation_rows(int(cfg["validate"]["deliveries"]), cfg["seed"]))
    table = ResultTable(list(rows[0]))
    for r in rows:
        table.append([r[c] for c in table.columns])
    ok = all(abs(r["z"]) <= 3 for r in rows)
    return table, EXIT_OK if ok else EXIT_CHECK_FAILED


# -------------------------------------------------------------------- run

def run(cfg: dict, subcommand: str | None = None) -> tuple[ResultTable, int]:
    """Validate, dispatch and tag the result with metadata.

    Returns the table and an exit status: 0 success, 1 a validation check
    failed, 3 some solver did not converge. Invalid configs raise
    ConfigError (status 2); a degenerate simulation raises
    DegenerateEstimateError (status 4).
    """
    cfg = normalize(cfg, subcommand)
    exp = cfg["experiment"]
    if exp in SUBCOMMAND_KINDS:
        table, status = _run_sweep(cfg)
    elif exp == "aoi":
        table, status = _run_aoi(cfg)
    elif exp == "simulate":
        table, status = _run_simulate(cfg)
    else:
        table, status = _run_validate(cfg)
    table.metadata = {
        "experiment": exp if exp not in SUBCOMMAND_KINDS else f"{exp}/{cfg['sweep']['kind']}",
        "config_hash": config_hash(cfg),
        "seed": cfg["seed"],
        "version": __version__,
    }
    if cfg.get("preset"):
        table.metadata["preset"] = cfg["preset"]
    return table, status


# ----------------------------------------------------------------- presets

_INIT_P = [0.5, 0.6, 0.3]  # (p, mu1P, mu2P) start used in the priority studies


def _eq_type(lam, V, eta, P_max, f_max):
    return [{"name": "a", "weight": 1.0, "lam": lam, "V": V, "eta": eta, "P_max": P_max, "f_max": f_max}]


def _presets() -> dict:
    light = _eq_type(1.0, 10.0, 0.5, 1.0, 0.8)
    heavy = _eq_type(10.0, 10.0, 0.02, 1.0, 0.8)
    return {
        "fig7": {
            "description": "Best-response local probability against a fixed ES load rho. "
                           "rho is exogenous; N=2 so lambda_e = rho mu3.",
            "experiment": "sweep", "system": {"N": 2, "mu3": 15.0}, "types": light,
            "sweep": {"kind": "mf-response", "axes": [{"name": "rho", "start": 0.0, "stop": 1.0, "step": 0.1}]},
        },
        "fig8": {
            "description": "MFE local probability and ES load against arrival rate and ES rate.",
            "experiment": "sweep", "system": {"N": 30, "mu3": 15.0}, "types": light,
            "sweep": {"kind": "mfe", "axes": [{"name": "lam", "values": [0.5, 1.0, 2.0, 3.0, 4.0]},
                                              {"name": "mu3", "values": [5.0, 10.0, 15.0, 20.0]}]},
        },
        "fig9": {
            "description": "Equilibrium power and AoI per user against 1/V.",
            "experiment": "sweep", "system": {"N": 60, "mu3": 15.0}, "types": heavy,
            "sweep": {"kind": "mfe", "axes": [{"name": "V", "values": [1.0, 2.0, 5.0, 10.0, 20.0, 50.0,
                                                                        100.0, 200.0, 500.0, 1000.0]}]},
        },
        "fig-sim4": {
            "description": "MFE policy and ES load against arrival rate and V.",
            "experiment": "sweep", "system": {"N": 60, "mu3": 15.0}, "types": heavy,
            "sweep": {"kind": "mfe", "axes": [{"name": "lam", "values": [2.0, 4.0, 6.0, 8.0, 10.0]},
                                              {"name": "V", "values": [5.0, 10.0, 20.0, 50.0]}]},
        },
        "table9": {
            "description": "NE against MFE per-user cost in the finite game, homogeneous devices "
                           "at N = 30, 40, 50.",
            "experiment": "sweep", "system": {"mu3": 15.0}, "types": light,
            "sweep": {"kind": "ne-vs-mfe", "axes": [{"name": "N", "values": [30, 40, 50]}]},
        },
        "fig10": {
            "description": "MM-MFE policies, costs and load against the price alpha.",
            "experiment": "sweep", "system": {"N": 30, "mu3": 15.0},
            "primary": {"lam_P": 4.0, "V": 10.0, "eta": 0.5, "P_max": 10.0, "f_max": 3.0},
            "types": [{"name": "s", "weight": 1.0, "lam": 5.0, "V": 10.0, "eta": 0.5, "f_max": 1.5}],
            "init": {"primary": _INIT_P, "types": [[0.5, 0.6]]},
            "sweep": {"kind": "mm-mfe", "axes": [{"name": "alpha", "values": [0.0, 0.5, 1.0, 1.5, 2.0]}]},
        },
        "fig11": {
            "description": "MM-MFE policies against primary and secondary arrival rates.",
            "experiment": "sweep", "system": {"N": 30, "mu3": 15.0, "alpha": 1.0},
            "primary": {"lam_P": 2.0, "V": 10.0, "eta": 0.5, "P_max": 2.0, "f_max": 0.5},
            "types": [{"name": "s", "weight": 1.0, "lam": 1.0, "V": 10.0, "eta": 0.5, "f_max": 0.7}],
            "init": {"primary": _INIT_P, "types": [[0.5, 0.2]]},
            "sweep": {"kind": "mm-mfe", "axes": [{"name": "lam_P", "values": [1.0, 2.0, 3.0, 4.0]},
                                                 {"name": "lam", "values": [1.0, 2.0, 3.0, 4.0]}]},
        },
        "utilization": {
            "description": "Primary transmitter utilization alone and with secondaries.",
            "experiment": "mm-mfe", "system": {"N": 30, "mu3": 15.0, "alpha": 1.0},
            "primary": {"lam_P": 2.0, "V": 10.0, "eta": 0.5, "P_max": 2.0, "f_max": 0.5},
            "types": [{"name": "s", "weight": 1.0, "lam": 1.0, "V": 10.0, "eta": 0.5, "f_max": 0.7}],
            "init": {"primary": _INIT_P, "types": [[0.5, 0.2]]},
            "sweep": {"kind": "utilization", "axes": []},
        },
        "validate": {
            "description": "Simulation against analytic AoI, five points per faithful topology.",
            "experiment": "validate", "validate": {"deliveries": 1_000_000},
        },
    }


def builtin_experiments() -> dict:
    """Named preset configs (fresh copies), each with a description."""
    presets = _presets()
    for name, p in presets.items():
        p["preset"] = name
    return presets


def preset(name: str) -> dict:
    presets = builtin_experiments()
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(presets)}")
    return presets[name]


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=False)
