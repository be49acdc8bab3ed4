"""Leading-order predictions for nucleation and transition times.

Every number produced here is a leading-order coefficient: a prediction
``(coefficient, exponent)`` stands for ``coefficient * r**exponent`` as the
scale parameter ``r`` grows. Lower-order corrections are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algorithm import AlgorithmTrace, RegimeTag, classify_regime, fork_regime
from .laws import (
    LawDescriptor,
    critical_truncated,
    dirac_at_1,
    exponential_unit,
    hypoexponential,
)
from .params import ModelParams


class PredictionError(ValueError):
    pass


class DegenerateRegimeError(PredictionError):
    """Maximum least degree d* <= 1: transition happens in time O(1)."""


class ConsistencyError(PredictionError):
    """Admissible traces disagree on d*, which the algorithm guarantees cannot happen."""


class GammaPositivityError(PredictionError):
    """The critical queue recursion produced a non-positive queue coefficient."""


@dataclass(frozen=True)
class UnavailableLaw:
    """Marker for a limit law that is not known (the critical regime)."""

    reason: str

    def to_json(self) -> dict:
        return {"kind": "unavailable", "params": {"reason": self.reason}}


DEGENERATE_NOTE = "O(1), constant not predicted"


def fork_constant(d: int, p: ModelParams) -> float:
    """``d * B**-(d-1)``: the rate constant of a d-fork's nucleation."""
    return d * float(p.B) ** (-(d - 1))


def iid_min_prefactor(n: int, d: int, p: ModelParams, kind: str) -> float:
    """Ratio ``E[min of n iid nucleation times] / E[one nucleation time]``.

    ``kind="exponential"`` covers subcritical forks, ``kind="polynomial"``
    the truncated-polynomial law of critical forks.
    """
    if n < 1 or d < 1:
        raise PredictionError("iid_min_prefactor needs n >= 1 and d >= 1")
    if kind == "exponential":
        return 1.0 / n
    if kind == "polynomial":
        K, drift = fork_constant(d, p), p.drift
        return (K + drift) / (n * K + drift)
    raise PredictionError(f"unknown kind {kind!r}")


def fork_mean_nucleation(d: int, n: int, Q_U: float, p: ModelParams) -> tuple[float, float]:
    """Mean of the first nucleation among ``n`` competing ``d``-forks.

    Returns ``(mean, f)`` where ``f`` is the prefactor applied to a single
    fork's mean. For ``d == 0`` the fork needs no U-node to switch off and
    the mean is reported as 0 (it is O(1), with no predicted constant).
    """
    if n < 1:
        raise PredictionError("n must be >= 1")
    if not Q_U > 0:
        raise PredictionError("Q_U must be positive")
    if d == 0:
        return 0.0, 1.0 / n
    K, drift = fork_constant(d, p), p.drift
    tag = fork_regime(d, p.beta)
    if tag is RegimeTag.SUBCRITICAL:
        f = 1.0 / n
        return f * Q_U ** (float(p.beta) * (d - 1)) / K, f
    if tag is RegimeTag.CRITICAL:
        f = (K + drift) / (n * K + drift)
        return f * Q_U / (K + drift), f
    return Q_U / drift, 1.0


def step_prefactor(d: int, n: int, p: ModelParams) -> float:
    """``f_k`` for one algorithm step, by the regime of its own fork."""
    if d == 0:
        return 1.0 / n
    tag = fork_regime(d, p.beta)
    if tag is RegimeTag.SUBCRITICAL:
        return 1.0 / n
    if tag is RegimeTag.CRITICAL:
        return iid_min_prefactor(n, d, p, "polynomial")
    return 1.0


@dataclass(frozen=True)
class GammaStep:
    f_prime: float | None
    gamma_before: float
    gamma_after: float


def gamma_sequence(trace: AlgorithmTrace, p: ModelParams) -> list[GammaStep]:
    """Mean U-queue coefficients before and after each step.

    Only critical paths move the queues on scale ``r``. Each step with
    ``d_bar == d*`` then takes mean time ``f'_k r`` with
    ``f'_k = gamma_before / (n_k K + c - rho_U)``, during which the surviving
    queues drain at speed ``c - rho_U``. On other paths gamma stays at
    ``gamma_U``.
    """
    gamma = float(p.gamma_U)
    regime = classify_regime(trace.d_star, p.beta)
    out = []
    if regime.tag is not RegimeTag.CRITICAL:
        return [GammaStep(None, gamma, gamma) for _ in trace.steps]
    drift = p.drift
    K = fork_constant(trace.d_star, p)
    for s in trace.steps:
        if s.d_bar != trace.d_star:
            out.append(GammaStep(None, gamma, gamma))
            continue
        f_prime = gamma / (s.n * K + drift)
        after = gamma - drift * f_prime
        if not after > 0:
            raise GammaPositivityError(f"gamma after step {len(out) + 1} is {after!r}")
        out.append(GammaStep(f_prime, gamma, after))
        gamma = after
    return out


@dataclass(frozen=True)
class PerStep:
    k: int
    d_bar: int
    f: float
    f_prime: float | None
    gamma_before: float

    def to_json(self) -> dict:
        return {"k": self.k, "d_bar": self.d_bar, "f": self.f, "f_prime": self.f_prime,
                "gamma_before": self.gamma_before}


@dataclass(frozen=True)
class TransitionPrediction:
    coefficient: float
    exponent: float
    regime: RegimeTag
    law: LawDescriptor | UnavailableLaw | None
    per_step: tuple[PerStep, ...] = ()
    note: str = ""
    components: tuple[tuple[Fraction, float], ...] = field(default=())

    def mean(self, r: float) -> float:
        return self.coefficient * float(r) ** self.exponent

    @property
    def degenerate(self) -> bool:
        return self.regime is RegimeTag.DEGENERATE

    def to_json(self) -> dict:
        doc = {
            "coefficient": self.coefficient,
            "exponent": self.exponent,
            "regime": self.regime.value,
            "law": None if self.law is None else self.law.to_json(),
            "per_step": [s.to_json() for s in self.per_step],
        }
        if self.note:
            doc["note"] = self.note
        if self.components:
            doc["components"] = [{"prob": f"{pr.numerator}/{pr.denominator}", "coefficient": c}
                                 for pr, c in self.components]
        return doc


def _per_step(trace: AlgorithmTrace, p: ModelParams) -> tuple[PerStep, ...]:
    gammas = gamma_sequence(trace, p)
    return tuple(
        PerStep(k, s.d_bar, step_prefactor(s.d_bar, s.n, p), gs.f_prime, gs.gamma_before)
        for k, (s, gs) in enumerate(zip(trace.steps, gammas), start=1)
    )


def law_for_trace(trace: AlgorithmTrace, p: ModelParams) -> LawDescriptor | UnavailableLaw:
    """Limit law of ``tau / E[tau | path]`` along one admissible path.

    Subcritical: the normalized sum of independent exponentials, one per
    step attaining d*, with rates ``S / f_k`` where ``S`` sums those
    ``f_k = 1/n_k``. Supercritical: a point mass at 1. Critical: unknown.
    """
    regime = classify_regime(trace.d_star, p.beta)
    if regime.tag is RegimeTag.DEGENERATE:
        raise DegenerateRegimeError("no limit law when d* <= 1")
    if regime.tag is RegimeTag.SUPERCRITICAL:
        return dirac_at_1()
    if regime.tag is RegimeTag.CRITICAL:
        return UnavailableLaw("critical regime: limit law not known")
    fs = [Fraction(1, s.n) for s in trace.steps if s.d_bar == trace.d_star]
    S = sum(fs)
    if len(fs) == 1:
        return exponential_unit()
    return hypoexponential([float(S / f) for f in fs])


def mean_transition(trace: AlgorithmTrace, p: ModelParams) -> TransitionPrediction:
    """Leading-order mean transition time conditional on following ``trace``."""
    d_star = trace.d_star
    regime = classify_regime(d_star, p.beta)
    if regime.tag is RegimeTag.DEGENERATE:
        return TransitionPrediction(0.0, 0.0, regime.tag, None, note=DEGENERATE_NOTE)
    per_step = _per_step(trace, p)
    gamma_U = float(p.gamma_U)
    if regime.tag is RegimeTag.SUBCRITICAL:
        exponent = float(p.beta) * (d_star - 1)
        scale = gamma_U ** exponent / fork_constant(d_star, p)
        coef = sum(1.0 / s.n for s in trace.steps if s.d_bar == d_star) * scale
    elif regime.tag is RegimeTag.CRITICAL:
        exponent = 1.0
        coef = sum(ps.f_prime for ps in per_step if ps.f_prime is not None)
    else:
        exponent = 1.0
        coef = gamma_U / p.drift
    return TransitionPrediction(coef, exponent, regime.tag, law_for_trace(trace, p), per_step)


def mixture_mean(traces: Iterable[AlgorithmTrace], p: ModelParams) -> TransitionPrediction:
    """Probability-weighted mean over admissible traces."""
    traces = list(traces)
    if not traces:
        raise PredictionError("no traces given")
    d_stars = {t.d_star for t in traces}
    if len(d_stars) != 1:
        raise ConsistencyError(f"admissible traces disagree on d*: {sorted(d_stars)}")
    total = sum((t.probability for t in traces), Fraction(0))
    if total != 1:
        raise PredictionError(f"trace probabilities sum to {total}, not 1")
    preds = [mean_transition(t, p) for t in traces]
    first = preds[0]
    if first.degenerate:
        return TransitionPrediction(0.0, 0.0, first.regime, None, note=DEGENERATE_NOTE)
    coef = float(sum(t.probability * Fraction(pr.coefficient) for t, pr in zip(traces, preds)))
    laws = {pr.law for pr in preds}
    law = first.law if len(laws) == 1 else None
    components = tuple((t.probability, pr.coefficient) for t, pr in zip(traces, preds))
    per_step = first.per_step if len(traces) == 1 else ()
    return TransitionPrediction(coef, first.exponent, first.regime, law, per_step, components=components)


def complete_bipartite_prediction(m: int, p: ModelParams) -> TransitionPrediction:
    """Mean and law for a complete bipartite graph with ``|U| = m``."""
    if m <= 1:
        raise PredictionError("complete bipartite prediction needs |U| >= 2")
    K, drift = fork_constant(m, p), p.drift
    gamma_U = float(p.gamma_U)
    tag = fork_regime(m, p.beta)
    if tag is RegimeTag.SUBCRITICAL:
        exponent = float(p.beta) * (m - 1)
        return TransitionPrediction(gamma_U ** exponent / K, exponent, tag, exponential_unit())
    if tag is RegimeTag.CRITICAL:
        return TransitionPrediction(gamma_U / (K + drift), 1.0, tag, critical_truncated(drift / (K + drift)))
    return TransitionPrediction(gamma_U / drift, 1.0, tag, dirac_at_1())
