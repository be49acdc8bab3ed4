from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipartite_access.algorithm import AlgorithmTrace, RegimeTag, Step, enumerate_admissible
from bipartite_access.graph import BipartiteGraph
from bipartite_access.laws import CRITICAL_TRUNCATED, EXPONENTIAL_UNIT, HYPOEXPONENTIAL
from bipartite_access.params import ModelParams
from bipartite_access.predictor import (
    ConsistencyError,
    DegenerateRegimeError,
    PredictionError,
    UnavailableLaw,
    complete_bipartite_prediction,
    fork_mean_nucleation,
    gamma_sequence,
    iid_min_prefactor,
    law_for_trace,
    mean_transition,
    mixture_mean,
)


def complete(m, n=1):
    us = [f"u{i}" for i in range(m)]
    vs = [f"v{j}" for j in range(n)]
    return BipartiteGraph.from_edges(us, vs, [(u, v) for u in us for v in vs])


def test_fig4_critical_recursion(fig4, params):
    p = params("fig4_crit.json")
    t = next(t for t in enumerate_admissible(fig4) if t.order[0] == "v2")
    gs = gamma_sequence(t, p)
    # hand-derived: K = 2, drift = 1/2, n = (2, 1, 1, 1), d_bar = (2, 1, 2, 1)
    assert gs[0].f_prime == pytest.approx(1 / 4.5)
    assert gs[0].gamma_after == pytest.approx(0.88889, abs=5e-6)
    assert gs[1].f_prime is None and gs[1].gamma_after == gs[0].gamma_after
    assert gs[2].f_prime == pytest.approx(0.35556, abs=5e-6)
    assert gs[2].gamma_after == pytest.approx(0.71111, abs=5e-6)
    pred = mean_transition(t, p)
    assert pred.regime is RegimeTag.CRITICAL and pred.exponent == 1
    assert pred.coefficient == pytest.approx(0.57778, abs=5e-6)
    assert isinstance(pred.law, UnavailableLaw)


def test_fig4_critical_other_path(fig4, params):
    p = params("fig4_crit.json")
    t = next(t for t in enumerate_admissible(fig4) if t.order[0] == "v4")
    # d_bar = (2, 2, 1, 1): steps 1 and 2 both drain, with n = 2 then 1
    f1 = 1 / 4.5
    g1 = 1 - 0.5 * f1
    assert mean_transition(t, p).coefficient == pytest.approx(f1 + g1 / 2.5)


def test_fig4_subcritical_mean_and_law(fig4, params):
    p = params("fig4_sub.json")
    pred = mixture_mean(enumerate_admissible(fig4), p)
    assert pred.regime is RegimeTag.SUBCRITICAL
    assert pred.coefficient == pytest.approx(0.75) and pred.exponent == pytest.approx(0.5)
    assert pred.mean(10_000) == pytest.approx(75.0)
    assert pred.law.kind == HYPOEXPONENTIAL and sorted(pred.law.rates) == pytest.approx([1.5, 3.0])
    assert pred.law.mean() == pytest.approx(1.0)


def test_fig8_laws(fig8, params):
    p = params("sub.json")
    kinds = sorted(law_for_trace(t, p).kind for t in enumerate_admissible(fig8))
    assert kinds == [EXPONENTIAL_UNIT, HYPOEXPONENTIAL]


def test_complete_bipartite_three_regimes(params):
    sub = complete_bipartite_prediction(3, params("sub.json"))
    assert sub.mean(2000) == pytest.approx(2000 ** 0.5 / 3)
    assert sub.law.kind == EXPONENTIAL_UNIT
    crit = complete_bipartite_prediction(3, params("crit.json"))
    assert crit.mean(500) == pytest.approx(500 / 3.5)
    assert crit.law.kind == CRITICAL_TRUNCATED and crit.law.C == pytest.approx(1 / 7)
    sup = complete_bipartite_prediction(3, params("sup.json"))
    assert sup.mean(5000) == pytest.approx(10_000)
    with pytest.raises(PredictionError):
        complete_bipartite_prediction(1, params("sub.json"))


def test_iid_prefactors(params):
    p = params("fig4_crit.json")
    assert iid_min_prefactor(2, 2, p, "polynomial") == pytest.approx(5 / 9)
    assert iid_min_prefactor(3, 2, p, "exponential") == pytest.approx(1 / 3)
    assert iid_min_prefactor(1, 2, p, "polynomial") == 1.0
    with pytest.raises(PredictionError):
        iid_min_prefactor(0, 2, p, "exponential")
    with pytest.raises(PredictionError):
        iid_min_prefactor(2, 2, p, "other")


def test_fork_mean_nucleation(params):
    p = params("crit.json")
    assert fork_mean_nucleation(0, 2, 10.0, p) == (0.0, 0.5)
    mean, f = fork_mean_nucleation(3, 1, 500.0, p)
    assert f == 1.0 and mean == pytest.approx(500 / 3.5)
    mean, f = fork_mean_nucleation(2, 2, 400.0, p)  # subcritical: 400**0.5 / 2 / 2
    assert f == 0.5 and mean == pytest.approx(5.0)
    assert fork_mean_nucleation(5, 3, 100.0, p) == (pytest.approx(200.0), 1.0)
    with pytest.raises(PredictionError):
        fork_mean_nucleation(2, 1, 0.0, p)


def test_degenerate(params):
    p = params("sub.json")
    t = enumerate_admissible(complete(1))[0]
    pred = mean_transition(t, p)
    assert pred.degenerate and pred.coefficient == 0 and pred.note
    with pytest.raises(DegenerateRegimeError):
        law_for_trace(t, p)


def test_mixture_errors(params):
    p = params("sub.json")
    a = AlgorithmTrace((Step("v1", 2, 2),))
    b = AlgorithmTrace((Step("v2", 3, 2),))
    with pytest.raises(ConsistencyError):
        mixture_mean([a, b], p)
    with pytest.raises(PredictionError, match="sum to"):
        mixture_mean([a], p)
    with pytest.raises(PredictionError):
        mixture_mean([], p)


def test_prediction_json(fig4, params):
    doc = mixture_mean(enumerate_admissible(fig4), params("fig4_crit.json")).to_json()
    assert doc["regime"] == "critical" and doc["law"]["kind"] == "unavailable"
    assert [c["prob"] for c in doc["components"]] == ["1/2", "1/2"]


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(2, 6),
    beta=st.sampled_from([Fraction(1, 10), Fraction(1, 5), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)]),
    B=st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2)]),
    gamma=st.sampled_from([1, 2]),
)
def test_single_fork_matches_complete_bipartite(m, beta, B, gamma):
    p = ModelParams(lam=0.5, mu_U=1, mu_V=1, c=1, B=B, beta=beta, B_prime=1,
                    beta_prime=beta + 2, gamma_U=gamma, gamma_V=1, r=1000)
    t = enumerate_admissible(complete(m))[0]
    general = mean_transition(t, p)
    special = complete_bipartite_prediction(m, p)
    assert general.regime is special.regime
    assert general.coefficient == pytest.approx(special.coefficient)
    assert general.exponent == pytest.approx(special.exponent)
