"""Exact event-driven simulation of the joint activity / queue process.

Between two events every clock rate is constant: inactive queues do not move,
arrivals come at rate ``lambda`` per node and active nodes switch off at rate
1. The process is therefore simulated exactly as a race of exponential
clocks, recomputed after each event. A node with an active neighbor carries
no activation clock at all; by memorylessness this has the same law as
sampling attempts and discarding the blocked ones.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .graph import BipartiteGraph
from .params import ModelParams

DEFAULT_CAP_EVENTS = 100_000_000
MAX_SEED = 2**32 - 1


class SimulationError(RuntimeError):
    pass


def queue_at(value: float, active: bool, dt: float, c: float) -> float:
    """Queue content after ``dt`` without arrivals: linear drain, reflected at 0."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if not active:
        return value
    return max(value - c * dt, 0.0)


def activation_rate(g: BipartiteGraph, p: ModelParams, w: str, q: float) -> float:
    if q <= 0:
        return 0.0
    if w in g.v_nodes:
        return float(p.B_prime) * q ** float(p.beta_prime)
    return float(p.B) * q ** float(p.beta)


@dataclass(frozen=True)
class SimOutcome:
    tau: float
    order: tuple[str, ...]
    snapshots: tuple[dict, ...]
    events: int
    seed: int
    capped: bool
    reactivations: int = 0

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "order": list(self.order),
            "snapshots": [dict(s) for s in self.snapshots],
            "events": self.events,
            "seed": self.seed,
            "capped": self.capped,
            "reactivations": self.reactivations,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SimOutcome":
        return cls(
            float(doc["tau"]), tuple(doc["order"]), tuple(dict(s) for s in doc["snapshots"]),
            int(doc["events"]), int(doc["seed"]), bool(doc["capped"]), int(doc.get("reactivations", 0)),
        )

    def to_jsonl(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def default_cap_time(p: ModelParams) -> float:
    return 10.0 * float(p.gamma_U) * float(p.r) / p.drift


@dataclass
class _Compiled:
    n_u: int
    adj_ptr: np.ndarray
    adj_idx: np.ndarray
    coef: np.ndarray
    expo: np.ndarray
    mu: np.ndarray
    q0: np.ndarray
    names: tuple[str, ...]


def _compile(g: BipartiteGraph, p: ModelParams) -> _Compiled:
    names = g.u_nodes + g.v_nodes
    index = {w: i for i, w in enumerate(names)}
    n_u = len(g.u_nodes)
    ptr = [0]
    idx: list[int] = []
    for w in names:
        idx.extend(sorted(index[x] for x in g.neighbors(w)))
        ptr.append(len(idx))
    on_u = np.arange(len(names)) < n_u
    r = float(p.r)
    return _Compiled(
        n_u=n_u,
        adj_ptr=np.asarray(ptr, dtype=np.int64),
        adj_idx=np.asarray(idx, dtype=np.int64),
        coef=np.where(on_u, float(p.B), float(p.B_prime)),
        expo=np.where(on_u, float(p.beta), float(p.beta_prime)),
        mu=np.where(on_u, float(p.mu_U), float(p.mu_V)),
        q0=np.where(on_u, float(p.gamma_U) * r, float(p.gamma_V) * r),
        names=names,
    )


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise SimulationError(f"seed must lie in [0, {MAX_SEED}]")
    return seed


def _run(cg: _Compiled, g: BipartiteGraph, p: ModelParams, seed: int, cap_events: int, cap_time: float) -> SimOutcome:
    status, tau, events, order, snaps, react = _kernel.run_replication(
        cg.n_u, cg.adj_ptr, cg.adj_idx, cg.coef, cg.expo, cg.mu,
        float(p.lam), float(p.c), cg.q0, seed, cap_events, cap_time,
    )
    names = cg.names
    order_names = tuple(names[i] for i in order if i >= 0)
    snapshots = []
    blocked: set[str] = set()
    for k, v in enumerate(order_names):
        blocked |= g.neighbors(v)
        snapshots.append({u: float(snaps[k, i]) for i, u in enumerate(g.u_nodes) if u not in blocked})
    return SimOutcome(float(tau), order_names, tuple(snapshots), int(events), seed,
                      status != _kernel.HIT, int(react))


def simulate(
    g: BipartiteGraph,
    p: ModelParams,
    seed: int,
    cap_events: int | None = None,
    cap_time: float | None = None,
) -> SimOutcome:
    """One replication from ``1_U`` until the first hit of ``1_V``.

    ``snapshots[k]`` maps each U-node still unblocked after the (k+1)-th
    first V-activation to its queue length at that instant. A run stopped by
    a cap returns ``capped=True`` with the partial bookkeeping.
    """
    cap_events = DEFAULT_CAP_EVENTS if cap_events is None else int(cap_events)
    cap_time = default_cap_time(p) if cap_time is None else float(cap_time)
    return _run(_compile(g, p), g, p, _check_seed(seed), cap_events, cap_time)


def simulate_many(
    g: BipartiteGraph,
    p: ModelParams,
    n_reps: int,
    base_seed: int,
    cap_events: int | None = None,
    cap_time: float | None = None,
    threads: int = 1,
) -> list[SimOutcome]:
    """Independent replications with seeds ``base_seed + i``, returned in seed order."""
    cap_events = DEFAULT_CAP_EVENTS if cap_events is None else int(cap_events)
    cap_time = default_cap_time(p) if cap_time is None else float(cap_time)
    cg = _compile(g, p)
    seeds = [_check_seed(base_seed + i) for i in range(n_reps)]
    if threads <= 1:
        return [_run(cg, g, p, s, cap_events, cap_time) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: _run(cg, g, p, s, cap_events, cap_time), seeds))


# ---------------------------------------------------------------------------
# Plain-Python reference: slow, eager, used to cross-check the kernel.


@dataclass
class NetworkState:
    activity: dict[str, bool]
    queues: dict[str, float]
    clock: float = 0.0
    first_order: list[str] = field(default_factory=list)

    @classmethod
    def initial(cls, g: BipartiteGraph, p: ModelParams) -> "NetworkState":
        r = float(p.r)
        activity = {u: True for u in g.u_nodes} | {v: False for v in g.v_nodes}
        queues = {u: float(p.gamma_U) * r for u in g.u_nodes} | {v: float(p.gamma_V) * r for v in g.v_nodes}
        return cls(activity, queues)

    def feasible(self, g: BipartiteGraph) -> bool:
        return not any(self.activity[u] and self.activity[v] for u, v in g.edges)

    def is_target(self, g: BipartiteGraph) -> bool:
        return all(self.activity[v] for v in g.v_nodes) and not any(self.activity[u] for u in g.u_nodes)


def event_rates(state: NetworkState, g: BipartiteGraph, p: ModelParams) -> list[tuple[tuple[str, str], float]]:
    """Every clock in the current race as ``((kind, node), rate)``."""
    out = []
    lam = float(p.lam)
    for w in g.u_nodes + g.v_nodes:
        out.append((("arrival", w), lam))
        if state.activity[w]:
            out.append((("deactivation", w), 1.0))
        elif not any(state.activity[x] for x in g.neighbors(w)):
            rate = activation_rate(g, p, w, state.queues[w])
            if rate > 0:
                out.append((("activation", w), rate))
    return out


def next_event(state: NetworkState, g: BipartiteGraph, p: ModelParams, rng: random.Random) -> tuple[tuple[str, str], float]:
    """Sample the winning clock and its holding time."""
    clocks = event_rates(state, g, p)
    total = math.fsum(r for _, r in clocks)
    if total <= 0:
        raise SimulationError("no clock is running")
    dt = rng.expovariate(total)
    x = rng.random() * total
    for ev, rate in clocks:
        if x < rate:
            return ev, dt
        x -= rate
    return clocks[-1][0], dt


def apply_event(state: NetworkState, g: BipartiteGraph, p: ModelParams, event, dt: float, rng: random.Random) -> None:
    c = float(p.c)
    for w, q in state.queues.items():
        state.queues[w] = queue_at(q, state.activity[w], dt, c)
    state.clock += dt
    kind, w = event
    if kind == "arrival":
        mu = float(p.mu_V) if w in g.v_nodes else float(p.mu_U)
        state.queues[w] += rng.expovariate(mu)
    elif kind == "deactivation":
        state.activity[w] = False
    else:
        state.activity[w] = True
        if w in g.v_nodes and w not in state.first_order:
            state.first_order.append(w)


def simulate_reference(g: BipartiteGraph, p: ModelParams, seed: int, cap_events: int = 10_000_000) -> tuple[float, tuple[str, ...], int]:
    """Naive re-implementation: returns ``(tau, order, events)``; ``tau`` is nan when capped."""
    rng = random.Random(seed)
    state = NetworkState.initial(g, p)
    events = 0
    while not state.is_target(g):
        if events >= cap_events:
            return math.nan, tuple(state.first_order), events
        ev, dt = next_event(state, g, p, rng)
        apply_event(state, g, p, ev, dt, rng)
        events += 1
    return state.clock, tuple(state.first_order), events
