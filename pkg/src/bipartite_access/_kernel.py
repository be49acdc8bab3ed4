"""JIT-compiled event loop for the activity/queue process.

Nodes are integers: U occupies ``0..n_u-1`` and V occupies ``n_u..n-1``.
Adjacency is CSR (``adj_ptr``, ``adj_idx``). Per-node arrays hold the
activation coefficient, exponent and service rate of the node's side.
"""

import numpy as np
from numba import njit

# cause codes for the returned status
HIT = 0
CAPPED_EVENTS = 1
CAPPED_TIME = 2


@njit(cache=True, nogil=True)
def _drained(q, t_last, now, c):
    v = q - c * (now - t_last)
    return v if v > 0.0 else 0.0


@njit(cache=True, nogil=True)
def _act_rate(coef, expo, q):
    if q <= 0.0:
        return 0.0
    return coef * q ** expo


@njit(cache=True, nogil=True)
def run_replication(
    n_u, adj_ptr, adj_idx, coef, expo, mu, lam, c, q0, seed, max_events, max_time,
):
    """Simulate from all-U-active until all V are active and all U inactive.

    Returns ``(status, tau, n_events, order, snapshots, reactivations)``.
    ``order`` lists V indices (offset by ``n_u``) by first activation, padded
    with -1; ``snapshots[k]`` holds every U-queue at the k-th first
    activation; ``reactivations`` counts U activations after the node was
    first blocked by an activating V-neighbor.
    """
    np.random.seed(seed)
    n = q0.shape[0]
    n_v = n - n_u

    active = np.zeros(n, dtype=np.bool_)
    q = q0.copy()
    t_last = np.zeros(n)
    n_blockers = np.zeros(n, dtype=np.int64)
    rate = np.zeros(n)

    for w in range(n_u):
        active[w] = True
    for w in range(n_u):
        for j in range(adj_ptr[w], adj_ptr[w + 1]):
            n_blockers[adj_idx[j]] += 1
    for w in range(n):
        if active[w]:
            rate[w] = 1.0
        elif n_blockers[w] == 0:
            rate[w] = _act_rate(coef[w], expo[w], q[w])

    order = -np.ones(n_v, dtype=np.int64)
    snapshots = np.full((n_v, n_u), np.nan)
    seen = np.zeros(n, dtype=np.bool_)
    blocked_once = np.zeros(n_u, dtype=np.bool_)
    n_first = 0
    n_active_u = n_u
    n_active_v = 0
    reactivations = 0

    arrival_total = lam * n
    t = 0.0
    events = 0
    if n_active_u == 0 and n_active_v == n_v:
        return HIT, 0.0, 0, order, snapshots, 0

    while True:
        if events >= max_events:
            return CAPPED_EVENTS, t, events, order, snapshots, reactivations
        total = arrival_total
        for w in range(n):
            total += rate[w]
        t += np.random.exponential(1.0 / total)
        if t > max_time:
            return CAPPED_TIME, max_time, events, order, snapshots, reactivations
        events += 1

        x = np.random.random() * total
        if x < arrival_total:
            w = int(x / lam)
            if w >= n:
                w = n - 1
            if active[w]:
                q[w] = _drained(q[w], t_last[w], t, c)
            t_last[w] = t
            q[w] += np.random.exponential(1.0 / mu[w])
            if not active[w] and n_blockers[w] == 0:
                rate[w] = _act_rate(coef[w], expo[w], q[w])
            continue

        x -= arrival_total
        w = n - 1
        for i in range(n):
            if x < rate[i]:
                w = i
                break
            x -= rate[i]
        if rate[w] == 0.0:
            # rounding pushed x past the last positive rate
            for i in range(n - 1, -1, -1):
                if rate[i] > 0.0:
                    w = i
                    break

        if active[w]:
            # deactivation: all neighbors of an active node are inactive
            q[w] = _drained(q[w], t_last[w], t, c)
            t_last[w] = t
            active[w] = False
            rate[w] = _act_rate(coef[w], expo[w], q[w])
            if w < n_u:
                n_active_u -= 1
            else:
                n_active_v -= 1
            for j in range(adj_ptr[w], adj_ptr[w + 1]):
                nb = adj_idx[j]
                n_blockers[nb] -= 1
                if n_blockers[nb] == 0:
                    rate[nb] = _act_rate(coef[nb], expo[nb], q[nb])
        else:
            t_last[w] = t
            active[w] = True
            rate[w] = 1.0
            for j in range(adj_ptr[w], adj_ptr[w + 1]):
                nb = adj_idx[j]
                n_blockers[nb] += 1
                rate[nb] = 0.0
            if w < n_u:
                n_active_u += 1
                if blocked_once[w]:
                    reactivations += 1
            else:
                n_active_v += 1
                if not seen[w]:
                    seen[w] = True
                    order[n_first] = w
                    for u in range(n_u):
                        if active[u]:
                            snapshots[n_first, u] = _drained(q[u], t_last[u], t, c)
                        else:
                            snapshots[n_first, u] = q[u]
                    n_first += 1
                    for j in range(adj_ptr[w], adj_ptr[w + 1]):
                        blocked_once[adj_idx[j]] = True
        if n_active_u == 0 and n_active_v == n_v:
            return HIT, t, events, order, snapshots, reactivations
