"""Monte Carlo harness: run replications and score them against predictions.

Transition times are normalized by their *empirical* mean before the KS
comparison, so a mean error does not leak into the shape comparison.
Replications stopped by a cap are counted but excluded from all statistics.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .algorithm import AlgorithmTrace, RegimeTag, enumerate_admissible, truncate_at_supercritical
from .graph import BipartiteGraph, graph_to_json, is_complete_bipartite
from .laws import DIRAC_AT_1, HYPOEXPONENTIAL, LawDescriptor, critical_truncated
from .params import ModelParams
from .predictor import (
    TransitionPrediction,
    complete_bipartite_prediction,
    fork_constant,
    gamma_sequence,
    iid_min_prefactor,
    law_for_trace,
    mean_transition,
    mixture_mean,
)
from .simulator import SimOutcome, simulate_many


class ExperimentError(RuntimeError):
    pass


def ks_distance(samples, law: LawDescriptor) -> float:
    """Sup distance between the empirical CDF of ``samples`` and the law's CDF.

    Both one-sided limits are compared at every sample point, so the value
    stays exact when the law has an atom (the Dirac case).
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise ValueError("ks_distance needs at least one sample")
    n = xs.size
    F = law.cdf(xs)
    F_left = (xs > 1.0).astype(float) if law.kind == DIRAC_AT_1 else F
    ecdf = np.searchsorted(xs, xs, side="right") / n
    ecdf_left = np.searchsorted(xs, xs, side="left") / n
    return float(max(np.abs(ecdf - F).max(), np.abs(ecdf_left - F_left).max()))


# ---------------------------------------------------------------------------
# report records


@dataclass(frozen=True)
class PathFreq:
    order: tuple[str, ...]
    count: int
    frequency: float
    predicted: float
    admissible: bool

    def to_json(self) -> dict:
        return {"order": list(self.order), "count": self.count, "frequency": self.frequency,
                "predicted": self.predicted, "admissible": self.admissible}

    @classmethod
    def from_json(cls, d: dict) -> "PathFreq":
        return cls(tuple(d["order"]), d["count"], d["frequency"], d["predicted"], d["admissible"])


@dataclass(frozen=True)
class BucketStat:
    order: tuple[str, ...]
    count: int
    empirical_mean: float
    predicted_mean: float | None
    ks_distance: float | None

    def to_json(self) -> dict:
        return {"order": list(self.order), "count": self.count, "empirical_mean": self.empirical_mean,
                "predicted_mean": self.predicted_mean, "ks_distance": self.ks_distance}

    @classmethod
    def from_json(cls, d: dict) -> "BucketStat":
        return cls(tuple(d["order"]), d["count"], d["empirical_mean"], d["predicted_mean"], d["ks_distance"])


@dataclass(frozen=True)
class SnapshotStat:
    """Mean of ``Q_u / r`` over surviving U-nodes at the k-th first V-activation."""

    order: tuple[str, ...]
    k: int
    count: int
    empirical: float
    predicted: float | None

    def to_json(self) -> dict:
        return {"order": list(self.order), "k": self.k, "count": self.count,
                "empirical": self.empirical, "predicted": self.predicted}

    @classmethod
    def from_json(cls, d: dict) -> "SnapshotStat":
        return cls(tuple(d["order"]), d["k"], d["count"], d["empirical"], d["predicted"])


@dataclass(frozen=True)
class ExperimentReport:
    n_reps: int
    n_capped: int
    empirical_mean: float
    std_error: float
    cv: float
    predicted_mean: float | None
    ratio: float | None
    ks_distance: float | None
    law: dict | None
    regime: str
    path_freqs: tuple[PathFreq, ...]
    non_admissible_mass: float
    buckets: tuple[BucketStat, ...]
    snapshot_means: tuple[SnapshotStat, ...]
    reactivation_frequency: float
    taus: tuple[float, ...]
    params_echo: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n_reps": self.n_reps,
            "n_capped": self.n_capped,
            "empirical_mean": self.empirical_mean,
            "std_error": self.std_error,
            "cv": self.cv,
            "predicted_mean": self.predicted_mean,
            "ratio": self.ratio,
            "ks_distance": self.ks_distance,
            "law": self.law,
            "regime": self.regime,
            "path_freqs": [x.to_json() for x in self.path_freqs],
            "non_admissible_mass": self.non_admissible_mass,
            "buckets": [x.to_json() for x in self.buckets],
            "snapshot_means": [x.to_json() for x in self.snapshot_means],
            "reactivation_frequency": self.reactivation_frequency,
            "taus": list(self.taus),
            "params_echo": self.params_echo,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExperimentReport":
        return cls(
            d["n_reps"], d["n_capped"], d["empirical_mean"], d["std_error"], d["cv"],
            d["predicted_mean"], d["ratio"], d["ks_distance"], d["law"], d["regime"],
            tuple(PathFreq.from_json(x) for x in d["path_freqs"]), d["non_admissible_mass"],
            tuple(BucketStat.from_json(x) for x in d["buckets"]),
            tuple(SnapshotStat.from_json(x) for x in d["snapshot_means"]),
            d["reactivation_frequency"], tuple(d["taus"]), d["params_echo"],
        )


# ---------------------------------------------------------------------------
# prediction for a whole graph


def graph_prediction(g: BipartiteGraph, p: ModelParams, traces: list[AlgorithmTrace] | None = None) -> TransitionPrediction:
    """Pooled prediction: the complete-bipartite result when it applies, else the trace mixture."""
    if is_complete_bipartite(g) and len(g.u_nodes) >= 2:
        return complete_bipartite_prediction(len(g.u_nodes), p)
    return mixture_mean(traces if traces is not None else enumerate_admissible(g), p)


def _law_or_none(law) -> LawDescriptor | None:
    return law if isinstance(law, LawDescriptor) else None


def _match_key(order: tuple[str, ...], truncated_len: dict[tuple[str, ...], int]) -> tuple[str, ...] | None:
    for prefix, n in truncated_len.items():
        if order[:n] == prefix:
            return prefix
    return None


def run_experiment(
    g: BipartiteGraph,
    p: ModelParams,
    n_reps: int,
    base_seed: int,
    cap_events: int | None = None,
    cap_time: float | None = None,
    threads: int = 1,
    outcomes: list[SimOutcome] | None = None,
) -> ExperimentReport:
    """Simulate ``n_reps`` replications and compare them with the predictions.

    Supercritical paths are compared on their prefix up to the first
    supercritical step, since the order after that point is not
    determined by the algorithm.
    """
    if n_reps < 1:
        raise ExperimentError("n_reps must be >= 1")
    if outcomes is None:
        outcomes = simulate_many(g, p, n_reps, base_seed, cap_events, cap_time, threads)
    done = [o for o in outcomes if not o.capped]
    if not done:
        raise ExperimentError(f"all {len(outcomes)} replications hit a cap")
    r = float(p.r)
    taus = np.array([o.tau for o in done])
    mean = float(taus.mean())
    sd = float(taus.std(ddof=1)) if len(taus) > 1 else 0.0

    traces = enumerate_admissible(g)
    pooled = graph_prediction(g, p, traces)
    predicted = None if pooled.degenerate else pooled.mean(r)
    ratio = mean / predicted if predicted else None
    pooled_law = _law_or_none(pooled.law)
    ks = ks_distance(taus / mean, pooled_law) if pooled_law is not None and mean > 0 else None

    # admissible keys, truncated at the first supercritical step
    by_key: dict[tuple[str, ...], list[AlgorithmTrace]] = {}
    for t in traces:
        by_key.setdefault(truncate_at_supercritical(t, p.beta).order, []).append(t)
    key_len = {k: len(k) for k in by_key}

    # path frequencies over full observed orders
    counts: dict[tuple[str, ...], int] = {}
    for o in done:
        counts[o.order] = counts.get(o.order, 0) + 1
    path_freqs = []
    non_adm = 0
    for order in sorted(counts):
        key = _match_key(order, key_len)
        if key is None:
            non_adm += counts[order]
            prob = 0.0
        else:
            full = [t for t in by_key[key] if t.order == order]
            group = full if full else by_key[key]
            prob = float(sum((t.probability for t in group), Fraction(0)))
        path_freqs.append(PathFreq(order, counts[order], counts[order] / len(done), prob, key is not None))

    # per-bucket statistics, bucketed by admissible key
    buckets = []
    snaps = []
    for key in sorted(by_key):
        members = [o for o in done if o.order[: len(key)] == key]
        if not members:
            continue
        trace = by_key[key][0]
        pred = mean_transition(trace, p)
        bt = np.array([o.tau for o in members])
        bmean = float(bt.mean())
        if pred.degenerate:
            law = None
        elif len(traces) == 1:
            law = _law_or_none(pooled.law)
        else:
            law = _law_or_none(law_for_trace(trace, p))
        bks = ks_distance(bt / bmean, law) if law is not None and bmean > 0 else None
        buckets.append(BucketStat(key, len(members), bmean, None if pred.degenerate else pred.mean(r), bks))
        snaps.extend(_snapshot_stats(key, trace, members, p))

    n_u = len(g.u_nodes)
    react = sum(o.reactivations for o in done) / (len(done) * n_u) if n_u else 0.0
    return ExperimentReport(
        n_reps=len(outcomes),
        n_capped=len(outcomes) - len(done),
        empirical_mean=mean,
        std_error=sd / math.sqrt(len(done)),
        cv=sd / mean if mean > 0 else 0.0,
        predicted_mean=predicted,
        ratio=ratio,
        ks_distance=ks,
        law=None if pooled.law is None else pooled.law.to_json(),
        regime=pooled.regime.value,
        path_freqs=tuple(path_freqs),
        non_admissible_mass=non_adm / len(done),
        buckets=tuple(buckets),
        snapshot_means=tuple(snaps),
        reactivation_frequency=react,
        taus=tuple(float(t) for t in taus),
        params_echo={"graph": graph_to_json(g), "params": p.to_dict(), "n_reps": n_reps, "base_seed": base_seed},
    )


def _snapshot_stats(key, trace: AlgorithmTrace, members: list[SimOutcome], p: ModelParams) -> list[SnapshotStat]:
    r = float(p.r)
    tag = mean_transition(trace, p).regime
    if tag is RegimeTag.CRITICAL:
        predicted = [gs.gamma_after for gs in gamma_sequence(trace, p)]
    elif tag is RegimeTag.SUBCRITICAL:
        predicted = [float(p.gamma_U)] * len(trace)
    else:
        predicted = [None] * len(trace)
    out = []
    for k in range(len(key)):
        vals = [np.mean(list(o.snapshots[k].values())) / r
                for o in members if k < len(o.snapshots) and o.snapshots[k]]
        if vals:
            out.append(SnapshotStat(key, k + 1, len(vals), float(np.mean(vals)), predicted[k]))
    return out


# ---------------------------------------------------------------------------
# export


def _csv(rows, header, echo: dict) -> str:
    buf = io.StringIO()
    buf.write("# params_echo=" + json.dumps(echo, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def ecdf_table(report: ExperimentReport) -> list[tuple[float, float, float | None]]:
    xs = np.sort(np.asarray(report.taus)) / report.empirical_mean
    law = LawDescriptor.from_json(report.law) if report.law and report.law["kind"] != "unavailable" else None
    model = law.cdf(xs) if law is not None else [None] * len(xs)
    n = len(xs)
    return [(float(x), (i + 1) / n, None if m is None else float(m)) for i, (x, m) in enumerate(zip(xs, model))]


def export(report: ExperimentReport, fmt: str):
    """``json`` gives one document; ``csv`` gives a dict of table name to CSV text.

    Every CSV table starts with a ``# params_echo=...`` comment line.
    """
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    echo = report.params_echo
    summary = [(k, report.to_json()[k]) for k in (
        "n_reps", "n_capped", "empirical_mean", "std_error", "cv", "predicted_mean", "ratio",
        "ks_distance", "regime", "non_admissible_mass", "reactivation_frequency")]
    return {
        "summary": _csv(summary, ["field", "value"], echo),
        "ecdf": _csv(ecdf_table(report), ["x", "ecdf", "model_cdf"], echo),
        "path_freqs": _csv([(" ".join(x.order), x.count, x.frequency, x.predicted, int(x.admissible))
                            for x in report.path_freqs],
                           ["order", "count", "frequency", "predicted", "admissible"], echo),
        "snapshots": _csv([(s.k, s.empirical, s.predicted, " ".join(s.order), s.count) for s in report.snapshot_means],
                          ["k", "empirical", "predicted", "bucket", "count"], echo),
    }


# ---------------------------------------------------------------------------
# built-in self-tests


@dataclass(frozen=True)
class SelfTestResult:
    name: str
    value: float
    target: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "target": self.target,
                "tolerance": self.tolerance, "passed": self.passed}


def iid_min_selftest(p: ModelParams, d: int, ns=(2, 3, 5), n_samples: int = 1_000_000,
                     seed: int = 0, rtol: float = 0.01) -> list[SelfTestResult]:
    """Minimum of ``n`` i.i.d. nucleation times vs the closed-form prefactors.

    Critical forks use the truncated-polynomial law with
    ``C = drift / (K + drift)``; subcritical forks use unit exponentials.
    """
    rng = np.random.default_rng(seed)
    K, drift = fork_constant(d, p), p.drift
    law = critical_truncated(drift / (K + drift))
    out = []
    for n in ns:
        mins = law.sample(rng, n * n_samples).reshape(n_samples, n).min(axis=1)
        target = iid_min_prefactor(n, d, p, "polynomial")
        val = float(mins.mean())
        out.append(SelfTestResult(f"polynomial-min-n{n}", val, target, rtol, abs(val / target - 1) < rtol))
    for n in ns:
        mins = rng.exponential(1.0, (n_samples, n)).min(axis=1)
        target = iid_min_prefactor(n, d, p, "exponential")
        val = float(mins.mean())
        out.append(SelfTestResult(f"exponential-min-n{n}", val, target, rtol, abs(val / target - 1) < rtol))
    return out


def law_normalization_selftest(laws, atol: float = 1e-9) -> list[SelfTestResult]:
    """Each hypoexponential law integrates to 1 and has mean 1."""
    out = []
    for law in laws:
        if law.kind != HYPOEXPONENTIAL:
            continue
        tag = ",".join(f"{x:.6g}" for x in law.rates)
        dens = lambda x: law.density(x)  # noqa: E731
        mass = _integrate(dens)
        first = _integrate(lambda x: x * law.density(x))
        out.append(SelfTestResult(f"mass[{tag}]", mass, 1.0, atol, abs(mass - 1) < atol))
        out.append(SelfTestResult(f"mean[{tag}]", first, 1.0, atol, abs(first - 1) < atol))
    return out


def _integrate(f) -> float:
    # split at a few multiples of the unit mean so quad sees the bulk
    edges = [0.0, 1.0, 5.0, 25.0, math.inf]
    return float(sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
                     for a, b in zip(edges, edges[1:])))


def traces_laws(traces, p: ModelParams) -> list[LawDescriptor]:
    laws = []
    for t in traces:
        pred = mean_transition(t, p)
        law = _law_or_none(pred.law)
        if law is not None and law.kind != DIRAC_AT_1:
            laws.append(law)
    return laws
