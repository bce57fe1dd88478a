import json

import numpy as np
import pytest

from mpdagfair.equivalence import dag_to_cpdag
from mpdagfair.experiment import (
    ExperimentConfig,
    parse_config_text,
    records_csv,
    report_json,
    run_experiment,
    run_replicate,
    sample_background,
    setting_key,
)
from mpdagfair.scm import make_rng, random_er_dag

SMALL = dict(node_counts=[6], replicates=3, n=200, seed=2)


def test_config_defaults_and_validation():
    cfg = ExperimentConfig()
    assert cfg.node_counts == [10, 20, 30, 40]
    assert cfg.background_fractions == [0.3]
    with pytest.raises(ValueError):
        ExperimentConfig(split=1.0)
    with pytest.raises(ValueError):
        ExperimentConfig.from_mapping({"bogus": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(arity="4")


def test_config_text():
    kv = parse_config_text("# c\nnode_counts = 10,20\nbackground_fractions=0.1,0.5\nnonlinear=true\nn=500\n")
    assert kv == {"node_counts": [10, 20], "background_fractions": [0.1, 0.5], "nonlinear": True, "n": 500}
    assert parse_config_text('{"replicates": 4}') == {"replicates": 4}


def test_digest_ignores_workers():
    assert ExperimentConfig(workers=1).digest() == ExperimentConfig(workers=4).digest()
    assert ExperimentConfig(seed=1).digest() != ExperimentConfig(seed=2).digest()


def test_background_prefixes_nest():
    dag = random_er_dag(12, 24, seed=0)
    cp = dag_to_cpdag(dag)
    sets = [sample_background(dag, cp, f, make_rng(0, 12)) for f in (0.0, 0.3, 0.6, 1.0)]
    assert sets[0] == []
    for a, b in zip(sets, sets[1:]):
        assert b[: len(a)] == a
    assert set(sets[-1]) == {e for e in dag.sorted_directed() if cp.graph.has_undirected(*e)}


def test_edgeless_replicate():
    cfg = ExperimentConfig(node_counts=[4], edge_factor=0, replicates=1, n=50)
    rows = run_replicate(cfg, 4, 0)
    assert {r["method"] for r in rows} == {"Full", "Unaware", "FairRelax", "Oracle", "Fair"}
    for r in rows:
        assert r["unfairness"] <= 1e-12
        assert r["background_edges"] == 0


def test_report_structure():
    result = run_experiment(ExperimentConfig(**SMALL, background_fractions=[0.0, 1.0]))
    report = result["report"]
    assert set(report["settings"]) == {setting_key(6, 12, 0.0), setting_key(6, 12, 1.0)}
    assert report["provenance"]["seed"] == 2
    assert len(report["seeds"]) == 3
    for s in report["settings"].values():
        assert s["replicates"] == 3
        assert s["fair_subset_of_fairrelax"]
        assert s["methods"]["Fair"]["unfairness"]["mean"] <= 1e-9
    assert len(result["records"]) == 3 * 2 * 5
    full = report["settings"]["d6-e12-bk1"]
    assert full["methods"]["FairRelax"]["unfairness"]["mean"] <= 1e-9
    assert full["empty_background_replicates"] == [
        r["replicate"] for r in result["records"]
        if r["method"] == "Full" and r["background_fraction"] == 1.0 and r["background_edges"] == 0
    ]


def test_std_is_population_std():
    result = run_experiment(ExperimentConfig(**SMALL))
    vals = [r["rmse"] for r in result["records"] if r["method"] == "Full"]
    got = result["report"]["settings"]["d6-e12-bk0.3"]["methods"]["Full"]["rmse"]["std"]
    assert got == pytest.approx(np.std(vals), abs=1e-9)


def test_outputs_are_stable():
    a = run_experiment(ExperimentConfig(**SMALL))
    b = run_experiment(ExperimentConfig(**SMALL))
    assert report_json(a["report"]) == report_json(b["report"])
    assert records_csv(a["records"]) == records_csv(b["records"])
    json.loads(report_json(a["report"]))
    assert records_csv(a["records"]).splitlines()[0].startswith("setting,nodes,edges")


def test_nonlinear_experiment_runs():
    result = run_experiment(ExperimentConfig(**SMALL, nonlinear=True))
    for s in result["report"]["settings"].values():
        for m in s["methods"].values():
            assert np.isfinite(m["rmse"]["mean"])
        assert s["methods"]["Fair"]["unfairness"]["mean"] <= 1e-9
