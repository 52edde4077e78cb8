import json
from importlib import resources

import jsonschema
import pytest

from harmonic_entropy import experiments as ex
from harmonic_entropy.errors import ConfigError

SCHEMA = json.loads(resources.files("harmonic_entropy").joinpath("schemas/report.schema.json").read_text())


def small_area_law(**kw):
    base = dict(kind="area_law", realizations=6, chain_lengths=[64], subsystem_sizes=[4, 8, 16], seed=11)
    base.update(kw)
    return ex.ExperimentConfig(**base)


def test_config_roundtrip():
    cfg = small_area_law(region=None, ensemble={"mass": 0.5, "coupling": 1.0, "distribution": "constant",
                                                 "constant": 2.0})
    back = ex.ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert back == cfg


@pytest.mark.parametrize("bad", [
    {"kind": "nope"},
    {"realizations": 0},
    {"seed": -1},
    {"seed": 2**64},
    {"ladder": []},
    {"subsystem_sizes": [0]},
    {"subsystem_sizes": [300]},
    {"format": "xml"},
    {"which": "T"},
    {"ensemble": {"mass": -1.0}},
    {"ensemble": {"temperature": 1.0}},
    {"unknown_key": 1},
])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        ex.ExperimentConfig.from_dict(bad)


def test_load_config(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("kind: szego\nalpha: 0.25\nsizes: [2, 4]\n")
    assert ex.ExperimentConfig.from_dict(ex.load_config(str(p))).alpha == 0.25
    (tmp_path / "bad.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        ex.load_config(str(tmp_path / "bad.yaml"))
    with pytest.raises(ConfigError):
        ex.load_config(str(tmp_path / "missing.yaml"))


def test_area_law_small_run():
    rep = ex.run(small_area_law())
    assert rep.kind == "area_law"
    assert len(rep.rows) == 6 * 3
    agg = rep.aggregates["L=64"]
    assert agg["realizations_used"] == 6
    assert agg["decay_rate"]["mean"] > 0
    assert rep.verdicts["L=64:upper_bound_holds"]
    assert rep.verdicts["L=64:control_entropy_grows"]
    jsonschema.validate(json.loads(rep.to_json()), SCHEMA)


def test_area_law_excludes_assumption_violations():
    rep = ex.run(small_area_law(d_bound=5.0))
    agg = rep.aggregates["L=64"]
    assert agg["excluded"] and agg["realizations_used"] + len(agg["excluded"]) == 6


def test_area_law_region_override():
    rep = ex.run(small_area_law(region=[3, 4, 10]))
    assert {r["size"] for r in rep.rows} == {3}
    assert "L=64:size_slope_ci_contains_zero" not in rep.verdicts


def test_determinism_and_thread_independence():
    cfg = small_area_law()
    a = ex.run(cfg)
    b = ex.run(cfg)
    assert json.dumps(a.payload()) == json.dumps(b.payload())
    assert a.to_csv() == b.to_csv()
    c = ex.run(cfg.replace(threads=3))
    pa, pc = a.payload(), c.payload()
    assert pa["rows"] == pc["rows"]
    assert pa["aggregates"] == pc["aggregates"]


def test_divergence_small_ladders():
    rep = ex.run(ex.ExperimentConfig(kind="divergence_n", ladder=[1, 2, 4], m_multiplier=2))
    assert rep.passed
    assert rep.rows[0]["exact"] > 0
    rep = ex.run(ex.ExperimentConfig(kind="divergence_z", ladder=[1, 2, 4], m_multiplier=2))
    assert rep.passed and rep.verdicts["log_det_strictly_increasing"]
    for row in rep.rows:
        assert row["log_det"] == pytest.approx(row["det_bound"], abs=1e-9) or row["det_bound"] >= row["log_det"]


def test_chain_size_rule():
    cfg = ex.ExperimentConfig(kind="divergence_n")
    assert ex.chain_size(cfg, 2, "N") == 8 * 16
    assert ex.chain_size(cfg, 2, "Z") == 8 * 8
    assert ex.chain_size(cfg.replace(epsilon=0.5), 4, "Z") == 8 * 4**3.5


def test_szego_and_matel():
    rep = ex.run(ex.ExperimentConfig(kind="szego", alpha=-0.25, sizes=[2, 4, 8]))
    assert rep.passed and rep.columns == list(ex.SCAN_COLUMNS)
    assert ex.run(ex.ExperimentConfig(kind="szego", alpha=0.0, sizes=[2, 4])).passed
    for which in ("R", "S"):
        assert ex.run(ex.ExperimentConfig(kind="matel", which=which, matel_size=8)).passed


def test_validate_default_and_fault_injection():
    rep = ex.run(ex.ExperimentConfig())
    assert rep.passed
    assert {r["suite"] for r in rep.rows} == {"linalg", "model", "gaussian", "entropy", "toeplitz"}
    assert all(r["passed"] > 0 for r in rep.rows)
    bad = ex.run(ex.ExperimentConfig(spectrum_tol=0.0))
    assert not bad.passed
    assert any("UncertaintyViolation" in r["messages"] for r in bad.rows)


def test_csv_layout():
    rep = ex.run(ex.ExperimentConfig(kind="szego", sizes=[1, 2]))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,log_det,partial_sum,bound,exact"
    n, log_det, partial, bound, exact = lines[2].split(",")
    assert n == "2" and float(partial) == 0.25 * 1.5 and bound == "" and exact == ""
