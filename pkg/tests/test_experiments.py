import json

import numpy as np
import pytest

from bipartite_access.experiments import (
    ExperimentError,
    ExperimentReport,
    export,
    iid_min_selftest,
    ks_distance,
    law_normalization_selftest,
    run_experiment,
)
from bipartite_access.laws import critical_truncated, dirac_at_1, exponential_unit, hypoexponential


def test_ks_distance_examples():
    assert ks_distance([np.log(2.0)], exponential_unit()) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ks_distance([], exponential_unit())
    assert ks_distance([1.0, 1.0], dirac_at_1()) == 0.0
    assert ks_distance([0.5, 1.5], dirac_at_1()) == pytest.approx(0.5)
    assert ks_distance([0.9, 1.0, 1.0, 1.2], dirac_at_1()) == pytest.approx(0.25)


@pytest.mark.parametrize("law", [exponential_unit(), critical_truncated(1 / 7), hypoexponential([3.0, 1.5])])
def test_ks_self_consistency(law):
    xs = law.sample(np.random.default_rng(0), 10_000)
    assert ks_distance(xs, law) < 0.02


@pytest.fixture(scope="module")
def fig4_report():
    from conftest import DATA
    from bipartite_access.graph import load_graph
    from bipartite_access.params import load_params

    return run_experiment(load_graph(DATA / "fig4.txt"), load_params(DATA / "fig4_crit.json"), 60, 0)


def test_report_structure(fig4_report):
    r = fig4_report
    assert r.n_reps == 60 and r.n_capped == 0
    assert sum(x.frequency for x in r.path_freqs) == pytest.approx(1.0)
    assert r.ks_distance is None  # no known limit law in this regime
    assert r.predicted_mean == pytest.approx(0.57778 * 2000, rel=1e-4)
    assert r.std_error == pytest.approx(np.std(r.taus, ddof=1) / np.sqrt(60))
    ks = [s.k for s in r.snapshot_means if s.order[0] == "v2"]
    assert ks == [1, 2, 3]


def test_report_deterministic(fig4_report, fig4):
    from conftest import DATA
    from bipartite_access.params import load_params

    again = run_experiment(fig4, load_params(DATA / "fig4_crit.json"), 60, 0)
    assert export(again, "json") == export(fig4_report, "json")


def test_export_json_roundtrip(fig4_report):
    doc = json.loads(export(fig4_report, "json"))
    assert ExperimentReport.from_json(doc) == fig4_report
    assert doc["params_echo"]["params"]["r"] == 2000


def test_export_csv(fig4_report):
    tables = export(fig4_report, "csv")
    assert set(tables) == {"summary", "ecdf", "path_freqs", "snapshots"}
    for text in tables.values():
        assert text.startswith("# params_echo=")
    assert tables["ecdf"].splitlines()[1] == "x,ecdf,model_cdf"
    assert tables["snapshots"].splitlines()[1].startswith("k,empirical,predicted")
    assert len(tables["ecdf"].splitlines()) == 2 + 60
    with pytest.raises(ValueError):
        export(fig4_report, "xml")


def test_all_capped(k31, params):
    with pytest.raises(ExperimentError, match="cap"):
        run_experiment(k31, params("sup.json"), 3, 0, cap_events=10)
    with pytest.raises(ExperimentError):
        run_experiment(k31, params("sup.json"), 0, 0)


def test_capped_runs_are_excluded(k31, params):
    rep = run_experiment(k31, params("sup.json").with_(r=50), 20, 0, cap_time=60.0)
    assert 0 < rep.n_capped < 20
    assert len(rep.taus) == 20 - rep.n_capped


def test_iid_min_selftest_small(params):
    res = iid_min_selftest(params("crit.json"), 3, n_samples=200_000, seed=1, rtol=0.02)
    assert all(r.passed for r in res) and len(res) == 6


def test_law_normalization_selftest():
    res = law_normalization_selftest([hypoexponential([3.0, 1.5]), hypoexponential([3.0, 3.0, 3.0]), exponential_unit()])
    assert len(res) == 4 and all(r.passed for r in res)
