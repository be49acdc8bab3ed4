"""Limit laws of the normalized transition time ``tau / E[tau]``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

EXPONENTIAL_UNIT = "exponential-unit"
CRITICAL_TRUNCATED = "critical-truncated"
DIRAC_AT_1 = "dirac-at-1"
HYPOEXPONENTIAL = "hypoexponential"

KINDS = (EXPONENTIAL_UNIT, CRITICAL_TRUNCATED, DIRAC_AT_1, HYPOEXPONENTIAL)

# below this relative gap two hypoexponential rates count as repeated
DISTINCT_RATE_RTOL = 1e-8


@dataclass(frozen=True)
class LawDescriptor:
    kind: str
    C: float | None = None
    rates: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        if self.kind == CRITICAL_TRUNCATED and not (self.C is not None and 0 < self.C < 1):
            raise ValueError("critical-truncated law needs C in (0, 1)")
        if self.kind == HYPOEXPONENTIAL:
            if not self.rates or any(not (r > 0 and math.isfinite(r)) for r in self.rates):
                raise ValueError("hypoexponential law needs positive finite rates")

    # -- evaluation -------------------------------------------------------

    def survival(self, x: float) -> float:
        return eval_law(self, x)[1]

    def density(self, x: float) -> float:
        return eval_law(self, x)[0]

    def cdf(self, x):
        """Vectorized CDF; negative arguments map to 0."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([0.0 if v < 0 else 1.0 - eval_law(self, float(v))[1] for v in xs])
        return out if np.ndim(x) else float(out[0])

    def mean(self) -> float:
        if self.kind == HYPOEXPONENTIAL:
            return float(sum(1.0 / r for r in self.rates))
        # the other three kinds are normalized to mean 1
        return 1.0

    @property
    def upper(self) -> float:
        """Right end of the support."""
        if self.kind == CRITICAL_TRUNCATED:
            return 1.0 / self.C
        if self.kind == DIRAC_AT_1:
            return 1.0
        return math.inf

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == EXPONENTIAL_UNIT:
            return rng.exponential(1.0, size)
        if self.kind == DIRAC_AT_1:
            return np.ones(size)
        if self.kind == CRITICAL_TRUNCATED:
            return sample_critical_truncated(self.C, rng, size)
        return sum(rng.exponential(1.0 / r, size) for r in self.rates)

    def to_json(self) -> dict:
        params: dict = {}
        if self.kind == CRITICAL_TRUNCATED:
            params["C"] = self.C
        elif self.kind == HYPOEXPONENTIAL:
            params["rates"] = list(self.rates)
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_json(cls, doc: dict) -> "LawDescriptor":
        p = doc.get("params", {})
        return cls(doc["kind"], C=p.get("C"), rates=tuple(p.get("rates", ())))


def exponential_unit() -> LawDescriptor:
    return LawDescriptor(EXPONENTIAL_UNIT)


def critical_truncated(C: float) -> LawDescriptor:
    return LawDescriptor(CRITICAL_TRUNCATED, C=float(C))


def dirac_at_1() -> LawDescriptor:
    return LawDescriptor(DIRAC_AT_1)


def hypoexponential(rates) -> LawDescriptor:
    return LawDescriptor(HYPOEXPONENTIAL, rates=tuple(float(r) for r in rates))


def sample_critical_truncated(C: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Inverse-CDF draws from survival ``(1 - C x)**((1 - C)/C)`` on ``[0, 1/C)``."""
    u = rng.random(size)
    return (1.0 - u ** (C / (1.0 - C))) / C


# ---------------------------------------------------------------------------


def _rates_distinct(rates: tuple[float, ...]) -> bool:
    rs = sorted(rates)
    return all(b - a > DISTINCT_RATE_RTOL * b for a, b in zip(rs, rs[1:]))


def _hypo_partial_fractions(rates, x: float) -> tuple[float, float]:
    dens = surv = 0.0
    for i, li in enumerate(rates):
        w = 1.0
        for j, lj in enumerate(rates):
            if j != i:
                w *= lj / (lj - li)
        e = math.exp(-li * x)
        surv += w * e
        dens += w * li * e
    return max(dens, 0.0), min(max(surv, 0.0), 1.0)


def _hypo_phase_type(rates, x: float) -> tuple[float, float]:
    # serial phases: phase i exits to i+1 at rate rates[i], last phase absorbs
    m = len(rates)
    T = np.zeros((m, m))
    for i, r in enumerate(rates):
        T[i, i] = -r
        if i + 1 < m:
            T[i, i + 1] = r
    row = expm(T * x)[0]
    surv = float(row.sum())
    dens = float(row[-1] * rates[-1])
    return max(dens, 0.0), min(max(surv, 0.0), 1.0)


def eval_law(law: LawDescriptor, x: float) -> tuple[float, float]:
    """Return ``(density, survival)`` at ``x >= 0``.

    The Dirac law has no density; its value is reported as ``inf`` at 1 and
    0 elsewhere.
    """
    if x < 0 or math.isnan(x):
        raise ValueError("law evaluated at a negative argument")
    kind = law.kind
    if kind == EXPONENTIAL_UNIT:
        e = math.exp(-x)
        return e, e
    if kind == DIRAC_AT_1:
        return (math.inf if x == 1.0 else 0.0), (1.0 if x < 1.0 else 0.0)
    if kind == CRITICAL_TRUNCATED:
        C = law.C
        if x >= 1.0 / C:
            return 0.0, 0.0
        base = 1.0 - C * x
        return (1.0 - C) * base ** (1.0 / C - 2.0), base ** ((1.0 - C) / C)
    rates = law.rates
    if len(rates) == 1:
        e = math.exp(-rates[0] * x)
        return rates[0] * e, e
    if _rates_distinct(rates):
        return _hypo_partial_fractions(rates, x)
    return _hypo_phase_type(rates, x)
