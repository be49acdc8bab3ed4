"""Greedy minimum-degree elimination and admissible-path enumeration.

At every step the algorithm looks at the residual graph, picks uniformly at
random one of the V-nodes of least degree, and deletes that node's fork (the
node together with its U-neighbors). The sequence of picks is a path; the
paths the algorithm can produce are the admissible ones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .graph import BipartiteGraph, GraphError, min_degree_set, remove_fork

# relative tolerance for beta*(d-1) == 1 when beta is a float
CRITICAL_RTOL = 1e-12
DEFAULT_MAX_PATHS = 100_000


class PathLimitError(RuntimeError):
    """Admissible-path enumeration exceeded its configured cap."""


class RegimeTag(str, enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Step:
    node: str
    d_bar: int
    n: int


@dataclass(frozen=True)
class AlgorithmTrace:
    """One admissible path with its per-step ``(Y_k, d_bar_k, n_k)``."""

    steps: tuple[Step, ...]

    @property
    def order(self) -> tuple[str, ...]:
        return tuple(s.node for s in self.steps)

    @property
    def dbar(self) -> tuple[int, ...]:
        return tuple(s.d_bar for s in self.steps)

    @property
    def n(self) -> tuple[int, ...]:
        return tuple(s.n for s in self.steps)

    @property
    def d_star(self) -> int:
        return max(self.dbar, default=0)

    @property
    def probability(self) -> Fraction:
        p = Fraction(1)
        for s in self.steps:
            p /= s.n
        return p

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "order": list(self.order),
            "dbar": list(self.dbar),
            "n": list(self.n),
            "d_star": self.d_star,
            "prob": f"{self.probability.numerator}/{self.probability.denominator}",
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AlgorithmTrace":
        steps = tuple(Step(str(v), int(d), int(n)) for v, d, n in zip(doc["order"], doc["dbar"], doc["n"]))
        return cls(steps)


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    d_star: int
    beta: float | Fraction


def _beta_times(beta, d: int):
    """``beta * (d - 1)``, exact when beta is rational."""
    if isinstance(beta, (Fraction, int)):
        return Fraction(beta) * (d - 1)
    return float(beta) * (d - 1)


def fork_regime(d: int, beta) -> RegimeTag:
    """Classify a single fork of degree ``d`` (no degenerate case)."""
    x = _beta_times(beta, d)
    if isinstance(x, Fraction):
        if x == 1:
            return RegimeTag.CRITICAL
        return RegimeTag.SUBCRITICAL if x < 1 else RegimeTag.SUPERCRITICAL
    if math.isclose(x, 1.0, rel_tol=CRITICAL_RTOL, abs_tol=0.0):
        return RegimeTag.CRITICAL
    return RegimeTag.SUBCRITICAL if x < 1 else RegimeTag.SUPERCRITICAL


def classify_regime(d_star: int, beta) -> Regime:
    if d_star < 0:
        raise ValueError("d_star must be nonnegative")
    if not beta > 0:
        raise ValueError("beta must be positive")
    tag = RegimeTag.DEGENERATE if d_star <= 1 else fork_regime(d_star, beta)
    return Regime(tag, d_star, beta)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def run_algorithm(g: BipartiteGraph, rng=None) -> AlgorithmTrace:
    """Run the randomized algorithm once.

    ``rng`` is a numpy Generator or a seed. One uniform draw is consumed per
    step, including forced steps with a single candidate, so a given seed
    maps to the same trace regardless of the branching structure.
    """
    rng = _as_rng(rng)
    steps = []
    while g.v_nodes:
        d_bar, nodes, n = min_degree_set(g)
        u = rng.random()
        pick = nodes[min(int(u * n), n - 1)]
        steps.append(Step(pick, d_bar, n))
        g = remove_fork(g, pick)
    return AlgorithmTrace(tuple(steps))


def iter_admissible(g: BipartiteGraph) -> Iterator[AlgorithmTrace]:
    """Depth-first walk over every tie-breaking choice, in declaration order."""
    prefix: list[Step] = []

    def walk(h: BipartiteGraph) -> Iterator[AlgorithmTrace]:
        if not h.v_nodes:
            yield AlgorithmTrace(tuple(prefix))
            return
        d_bar, nodes, n = min_degree_set(h)
        for v in nodes:
            prefix.append(Step(v, d_bar, n))
            yield from walk(remove_fork(h, v))
            prefix.pop()

    yield from walk(g)


def enumerate_admissible(g: BipartiteGraph, max_paths: int | None = DEFAULT_MAX_PATHS) -> list[AlgorithmTrace]:
    """All admissible traces; their probabilities sum to exactly 1.

    Raises :class:`PathLimitError` once more than ``max_paths`` traces are
    produced (the count can grow factorially in ``|V|``).
    """
    out = []
    for trace in iter_admissible(g):
        out.append(trace)
        if max_paths is not None and len(out) > max_paths:
            raise PathLimitError(f"more than {max_paths} admissible paths")
    return out


def degree_sequence_of_path(g: BipartiteGraph, path: Sequence[str]) -> tuple[tuple[int, ...], int]:
    """Residual degree of each path node when its turn comes, and the maximum.

    Works for any ordering of V, admissible or not.
    """
    if sorted(path) != sorted(g.v_nodes) or len(set(path)) != len(path):
        raise GraphError("path is not a permutation of V")
    seq = []
    for v in path:
        seq.append(len(g.neighbors(v)))
        g = remove_fork(g, v)
    return tuple(seq), max(seq, default=0)


def truncate_at_supercritical(trace: AlgorithmTrace, beta) -> AlgorithmTrace:
    """Prefix up to and including the first step whose fork is supercritical."""
    for k, s in enumerate(trace.steps):
        if fork_regime(s.d_bar, beta) is RegimeTag.SUPERCRITICAL:
            return AlgorithmTrace(trace.steps[: k + 1])
    return trace


def multiplicity_of_dstar(trace: AlgorithmTrace) -> int:
    d_star = trace.d_star
    return sum(1 for d in trace.dbar if d == d_star)
