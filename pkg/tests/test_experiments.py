import math
from pathlib import Path

import pytest
import yaml
from hypothesis import given, settings, strategies as st

from mecaoi.cli import main
from mecaoi.experiments import (
    EXIT_DEGENERATE, EXIT_INVALID, EXIT_NONCONVERGED, EXIT_OK, ConfigError, _devices, builtin_experiments,
    config_hash, dump_config, load_config, normalize, preset, run,
)
from mecaoi.game import TypeProfile
from mecaoi.results import ResultTable

cell = st.one_of(
    st.floats(allow_nan=False),
    st.integers(-2**62, 2**62),
    st.booleans(),
    st.none(),
    st.text(st.characters(whitelist_categories=("L",)), min_size=1, max_size=6).filter(
        lambda s: s not in ("true", "false", "nan", "inf", "infinity") and not s.lower().startswith(("nan", "inf"))),
)


@settings(max_examples=200, deadline=None)
@given(rows=st.lists(st.lists(cell, min_size=3, max_size=3), max_size=5))
def test_csv_round_trip_is_exact(rows):
    t = ResultTable(["a", "b", "c"], rows, {"seed": 3, "config_hash": "abc"})
    back = ResultTable.from_csv(t.to_csv())
    assert back.columns == t.columns
    assert back.metadata == t.metadata
    for r, s in zip(t.rows, back.rows):
        for x, y in zip(r, s):
            assert type(x) is type(y)
            assert x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y))
    assert len(back.rows) == len(t.rows)


def test_table_rejects_ragged_rows():
    with pytest.raises(ValueError):
        ResultTable(["a", "b"], [[1]])
    with pytest.raises(ValueError):
        ResultTable(["a", "a"])


def test_file_round_trip(tmp_path):
    t = ResultTable(["x"], [[0.1], [1.0]], {"k": "v"})
    t.write(tmp_path / "t.csv")
    assert ResultTable.read(tmp_path / "t.csv") == t


# ------------------------------------------------------------ configs

def test_presets():
    presets = builtin_experiments()
    assert len(presets) == 9 and "validate" in presets
    t = presets["fig7"]["types"][0]
    assert (t["V"], t["eta"], t["lam"], t["P_max"], t["f_max"]) == (10, .5, 1, 1, .8)
    u = presets["utilization"]
    assert (u["system"]["N"], u["system"]["mu3"], u["system"]["alpha"]) == (30, 15, 1)
    assert (u["primary"]["lam_P"], u["primary"]["P_max"], u["primary"]["f_max"]) == (2, 2, .5)
    assert (u["types"][0]["lam"], u["types"][0]["f_max"], u["types"][0]["V"], u["types"][0]["eta"]) == (1, .7, 10, .5)
    for name, p in presets.items():
        assert p["description"]
        normalize(p)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


def test_config_hash_tracks_meaningful_fields():
    cfg = normalize(preset("fig9"))
    h = config_hash(cfg)
    assert config_hash(normalize(preset("fig9"))) == h
    assert config_hash({**cfg, "output": "x.csv", "jobs": 4, "description": "other"}) == h
    changed = normalize(preset("fig9"))
    changed["types"][0]["eta"] = 0.03
    assert config_hash(changed) != h
    changed = normalize({**preset("fig9"), "seed": 1})
    assert config_hash(changed) != h


@pytest.mark.parametrize("mutate", [
    lambda c: c["sweep"]["axes"].__setitem__(0, {"name": "rho", "start": 1.0, "stop": 0.0, "step": 0.1}),
    lambda c: c["sweep"]["axes"].__setitem__(0, {"name": "rho", "values": []}),
    lambda c: c["sweep"]["axes"].__setitem__(0, {"name": "bogus", "values": [1]}),
    lambda c: c["sweep"].__setitem__("kind", "nope"),
    lambda c: c.__setitem__("seed", -1),
    lambda c: c["solver"].__setitem__("gamma1", 2.0) if "solver" in c else c.__setitem__("solver", {"gamma1": 2.0}),
    lambda c: c["types"][0].pop("lam"),
    lambda c: c["system"].__setitem__("color", 1),
])
def test_invalid_configs_rejected(mutate):
    cfg = preset("fig7")
    mutate(cfg)
    with pytest.raises(ConfigError):
        normalize(cfg)


def test_largest_remainder_split():
    a = TypeProfile("a", 0.5, 1, 1, 1, 1, 1)
    b = TypeProfile("b", 0.3, 1, 1, 1, 1, 1)
    c = TypeProfile("c", 0.2, 1, 1, 1, 1, 1)
    devs = _devices((a, b, c), 7)
    assert [d.name for d in devs] == ["a"] * 4 + ["b"] * 2 + ["c"]


# ------------------------------------------------------------- runner

def test_fig7_sweep_through_run():
    table, status = run(preset("fig7"))
    assert status == EXIT_OK
    assert table.column("rho") == [round(0.1 * i, 12) for i in range(11)]
    p = table.column("p")
    assert all(a <= b + 1e-6 for a, b in zip(p, p[1:]))
    assert table.metadata["preset"] == "fig7"


def test_parallel_and_serial_sweeps_write_identical_bytes():
    cfg = preset("fig7")
    cfg["sweep"]["axes"][0] = {"name": "rho", "values": [0.0, 0.4, 0.8]}
    serial, _ = run({**cfg, "jobs": 1})
    parallel, _ = run({**cfg, "jobs": 2})
    assert serial.to_csv() == parallel.to_csv()


def test_nonconvergence_status():
    cfg = preset("fig9")
    cfg["sweep"]["axes"][0]["values"] = [10.0]
    cfg["solver"] = {"max_outer": 1, "multi_start": 1}
    _, status = run(cfg)
    assert status == EXIT_NONCONVERGED


def test_aoi_experiment():
    cfg = {"experiment": "aoi", "aoi": {"model": "equitable",
                                         "rates": {"lam": 10, "p": .5, "mu1": 1, "mu2": .8, "mu3": 15, "lambda_e": 5}}}
    table, status = run(cfg)
    assert status == EXIT_OK
    assert table.column("aoi")[0] == pytest.approx(0.8688503968669453, rel=1e-12)


# ---------------------------------------------------------------- CLI

def _write(tmp_path, cfg):
    path = tmp_path / "cfg.yaml"
    path.write_text(dump_config(cfg))
    return str(path)


def test_cli_list_presets(capsys):
    assert main(["list-presets"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 9


def test_cli_empty_range_is_invalid(tmp_path):
    cfg = preset("fig7")
    cfg["sweep"]["axes"][0] = {"name": "rho", "values": []}
    assert main(["sweep", "--config", _write(tmp_path, cfg)]) == EXIT_INVALID


def test_cli_unparseable_config(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("experiment: [unclosed")
    assert main(["sweep", "--config", str(path)]) == EXIT_INVALID
    assert main(["sweep", "--config", str(tmp_path / "missing.yaml")]) == EXIT_INVALID


def test_cli_degenerate_simulation(tmp_path):
    cfg = {"experiment": "simulate", "simulate": {
        "topology": "equitable-faithful", "horizon": 1.0,
        "devices": [{"lam": 1e-6, "p": .5, "mu1": 1, "mu2": 1, "mu3": 1}]}}
    assert main(["simulate", "--config", _write(tmp_path, cfg)]) == EXIT_DEGENERATE


def test_cli_writes_csv_with_metadata(tmp_path):
    cfg = {"experiment": "simulate", "seed": 5, "simulate": {
        "topology": "equitable-faithful", "horizon": 2000.0,
        "devices": [{"lam": 10, "p": .5, "mu1": 1, "mu2": .8, "mu3": 15, "lambda_e": 5}]}}
    out = tmp_path / "out.csv"
    assert main(["simulate", "--config", _write(tmp_path, cfg), "--out", str(out)]) == EXIT_OK
    t = ResultTable.read(out)
    assert t.metadata["seed"] == 5 and len(t.metadata["config_hash"]) == 16
    assert t.rows[0][t.columns.index("deliveries")] > 0
    # same seed, same bytes
    out2 = tmp_path / "out2.csv"
    main(["simulate", "--config", _write(tmp_path, cfg), "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_cli_preset_and_seed_override(tmp_path, capsys):
    assert main(["mfe", "--preset", "fig7", "--seed", "3"]) == EXIT_OK
    text = capsys.readouterr().out
    t = ResultTable.from_csv(text)
    assert t.metadata["seed"] == 3
    assert len(t.rows) == 11


def test_cli_wrong_subcommand_for_config(tmp_path):
    assert main(["mm-mfe", "--config", _write(tmp_path, preset("fig9"))]) == EXIT_INVALID


def test_config_dump_is_yaml():
    assert yaml.safe_load(dump_config(preset("fig10")))["sweep"]["kind"] == "mm-mfe"


def test_shipped_configs_match_presets():
    root = Path(__file__).resolve().parents[1] / "demos" / "configs"
    for name in builtin_experiments():
        shipped = normalize(load_config(root / f"{name}.yaml"))
        assert config_hash(shipped) == config_hash(normalize(preset(name))), name
