"""Hot loops: connectivity, served population, base-heuristic completion.

All functions take flat numpy arrays so they compile under numba's nopython
mode. A component is functional iff its remaining repair time is exactly 0.

Graph layout (CSR): neighbours of node ``v`` are ``adj[indptr[v]:indptr[v+1]]``;
``adj_comp`` holds the guarding component of each half-edge (-1 = none) and
``node_comp`` the guarding component of each node (-1 = none).
"""
from __future__ import annotations

import numpy as np

from ._jit import njit

RANDOM_BASE = 0
SMART_BASE = 1

HOUSEHOLDS = 0
COMBINED = 1


@njit
def energized_nodes(remaining, indptr, adj, adj_comp, node_comp, sources):
    n = indptr.shape[0] - 1
    on = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(sources.shape[0]):
        s = sources[i]
        c = node_comp[s]
        if on[s] or (c >= 0 and remaining[c] != 0.0):
            continue
        on[s] = True
        stack[top] = s
        top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        for j in range(indptr[v], indptr[v + 1]):
            w = adj[j]
            if on[w]:
                continue
            ce = adj_comp[j]
            if ce >= 0 and remaining[ce] != 0.0:
                continue
            cn = node_comp[w]
            if cn >= 0 and remaining[cn] != 0.0:
                continue
            on[w] = True
            stack[top] = w
            top += 1
    return on


@njit
def served_population(on, cell_node, cell_pop, ret_node, q, mode):
    total = 0.0
    n_ret = ret_node.shape[0]
    for c in range(cell_node.shape[0]):
        if not on[cell_node[c]]:
            continue
        if mode == HOUSEHOLDS:
            total += cell_pop[c]
            continue
        lit = 0
        for r in range(n_ret):
            if on[ret_node[r]]:
                lit += 1
        if lit == n_ret:
            total += cell_pop[c]
        elif lit > 0:
            s = 0.0
            for r in range(n_ret):
                if on[ret_node[r]]:
                    s += q[c, r]
            total += cell_pop[c] * s
    return total


@njit
def served(remaining, indptr, adj, adj_comp, node_comp, sources, cell_node, cell_pop, ret_node, q, mode):
    on = energized_nodes(remaining, indptr, adj, adj_comp, node_comp, sources)
    return served_population(on, cell_node, cell_pop, ret_node, q, mode)


@njit
def damaged_indices(remaining):
    m = 0
    for i in range(remaining.shape[0]):
        if remaining[i] > 0.0:
            m += 1
    out = np.empty(m, dtype=np.int64)
    m = 0
    for i in range(remaining.shape[0]):
        if remaining[i] > 0.0:
            out[m] = i
            m += 1
    return out


@njit
def random_choice(damaged, k, u, ptr):
    """Partial Fisher-Yates over ``damaged`` consuming ``u[ptr:ptr+k]``.

    Returns the chosen indices sorted ascending.
    """
    pool = damaged.copy()
    m = pool.shape[0]
    for i in range(k):
        j = i + int(u[ptr + i] * (m - i))
        if j >= m:
            j = m - 1
        tmp = pool[i]
        pool[i] = pool[j]
        pool[j] = tmp
    return np.sort(pool[:k])


@njit
def unblock_scores(remaining, damaged, indptr, adj, adj_comp, node_comp, sources, cell_node, cell_pop, ret_node, q):
    """Households newly energized if each damaged component alone were repaired."""
    base = served(remaining, indptr, adj, adj_comp, node_comp, sources,
                  cell_node, cell_pop, ret_node, q, HOUSEHOLDS)
    scores = np.empty(damaged.shape[0], dtype=np.float64)
    trial = remaining.copy()
    for i in range(damaged.shape[0]):
        c = damaged[i]
        saved = trial[c]
        trial[c] = 0.0
        scores[i] = served(trial, indptr, adj, adj_comp, node_comp, sources,
                           cell_node, cell_pop, ret_node, q, HOUSEHOLDS) - base
        trial[c] = saved
    return scores


@njit
def smart_choice(remaining, damaged, k, indptr, adj, adj_comp, node_comp, sources, cell_node, cell_pop, ret_node, q):
    """Top-k damaged components by unblock score; ties by ascending index."""
    scores = unblock_scores(remaining, damaged, indptr, adj, adj_comp, node_comp, sources,
                            cell_node, cell_pop, ret_node, q)
    # stable sort on -score keeps ascending index among equal scores
    order = np.argsort(-scores, kind="mergesort")
    return np.sort(damaged[order[:k]])


@njit
def apply_action(remaining, chosen):
    """Work-conserving advance in place; returns the elapsed interval."""
    dt = np.inf
    for i in range(chosen.shape[0]):
        r = remaining[chosen[i]]
        if r < dt:
            dt = r
    for i in range(chosen.shape[0]):
        remaining[chosen[i]] = remaining[chosen[i]] - dt
    return dt


@njit
def complete_with_base(remaining, clock, weighted, reach, base_kind, u, n_units, threshold,
                       stop_at_reach, indptr, adj, adj_comp, node_comp, sources,
                       cell_node, cell_pop, ret_node, q, mode):
    """Run the base heuristic from ``remaining`` (modified in place) to full repair.

    ``weighted`` accumulates served * interval, ``reach`` is the first clock at
    which served >= threshold (``inf`` while unreached). Returns the updated
    ``(clock, weighted, reach)``.
    """
    ptr = 0
    while True:
        damaged = damaged_indices(remaining)
        m = damaged.shape[0]
        if m == 0:
            break
        if stop_at_reach and reach < np.inf:
            break
        k = min(n_units, m)
        if k == m:
            chosen = damaged
        elif base_kind == RANDOM_BASE:
            chosen = random_choice(damaged, k, u, ptr)
            ptr += k
        else:
            chosen = smart_choice(remaining, damaged, k, indptr, adj, adj_comp, node_comp,
                                  sources, cell_node, cell_pop, ret_node, q)
        dt = apply_action(remaining, chosen)
        clock = clock + dt
        h = served(remaining, indptr, adj, adj_comp, node_comp, sources,
                   cell_node, cell_pop, ret_node, q, mode)
        weighted = weighted + h * dt
        if reach == np.inf and h >= threshold:
            reach = clock
    return clock, weighted, reach


@njit
def evaluate_candidates(candidates, remaining, clock, weighted, reach, base_kind, streams,
                        n_units, threshold, objective, indptr, adj, adj_comp, node_comp,
                        sources, cell_node, cell_pop, ret_node, q, mode):
    """Objective value of every (candidate, stream) completion.

    Objective 1 values are threshold clocks (``inf`` if never reached);
    objective 2 values are weighted service divided by makespan.
    """
    n_cand = candidates.shape[0]
    n_stream = streams.shape[0]
    out = np.empty((n_cand, n_stream), dtype=np.float64)
    stop = objective == 1
    for a in range(n_cand):
        after = remaining.copy()
        dt = apply_action(after, candidates[a])
        c1 = clock + dt
        h = served(after, indptr, adj, adj_comp, node_comp, sources,
                   cell_node, cell_pop, ret_node, q, mode)
        w1 = weighted + h * dt
        r1 = reach
        if r1 == np.inf and h >= threshold:
            r1 = c1
        for s in range(n_stream):
            work = after.copy()
            c2, w2, r2 = complete_with_base(work, c1, w1, r1, base_kind, streams[s], n_units,
                                            threshold, stop, indptr, adj, adj_comp, node_comp,
                                            sources, cell_node, cell_pop, ret_node, q, mode)
            if objective == 1:
                out[a, s] = r2
            else:
                out[a, s] = w2 / c2
    return out
