from __future__ import annotations

import numpy as np
import pytest

from epnrecovery.community import CommunityModel, GravityModel, GridCell, Retailer
from epnrecovery.config import load_config
from epnrecovery.epn import Component, build_network
from epnrecovery.fragility import DamageScenario
from epnrecovery.recovery import RecoveryProblem


def path_network(n=5, guard="edge"):
    """source - a - b - c - ... with one component per edge (or per node)."""
    names = ["s"] + [chr(ord("a") + i) for i in range(n - 1)]
    edges = list(zip(names, names[1:]))
    if guard == "edge":
        comps = [Component(f"E{u}{v}", "line_segment", ("edge", (u, v)), (0.0, 0.0)) for u, v in edges]
    else:
        comps = [Component(f"N{x}", "distribution_node", ("node", x), (0.0, 0.0)) for x in names]
    return build_network(names, edges, ["s"], comps, {x: "cell" for x in names[1:]})


def community_on(nodes, pops, retailers=(), b=-0.1, tt=None):
    cells = [GridCell(f"c{x}", (0.0, 0.0), int(p)) for x, p in zip(nodes, pops)]
    rets = [Retailer(f"R{j}", (0.0, 0.0), float(w), node) for j, (node, w) in enumerate(retailers)]
    if not rets:
        rets = [Retailer("R0", (0.0, 0.0), 1.0, nodes[0])]
    if tt is None:
        tt = np.zeros((len(cells), len(rets)))
    return CommunityModel(cells, rets, GravityModel(b, np.asarray(tt, dtype=float)),
                          {f"c{x}": x for x in nodes})


def problem_from(network, community, durations, n_units, mode="households", gamma=0.8):
    ids = network.component_ids
    d = [durations.get(cid, 0.0) for cid in ids]
    return RecoveryProblem(network, community, DamageScenario.from_durations(ids, d), n_units, mode, gamma)


def random_problem(rng, n_damaged, n_units, mode="households", gamma=0.8, integer=True,
                   n_nodes=None, n_retailers=2, extra_edges=2):
    """Random tree-plus-chords network with ``n_damaged`` damaged components.

    Every node and every edge is guarded by its own component; populations
    and durations are integers when ``integer`` is set so objectives are
    exactly representable.
    """
    n_nodes = n_nodes or max(3, n_damaged // 2 + 2)
    names = [f"v{i}" for i in range(n_nodes)]
    edges = set()
    for i in range(1, n_nodes):
        j = int(rng.integers(0, i))
        edges.add((names[j], names[i]))
    for _ in range(extra_edges):
        a, b = sorted(rng.choice(n_nodes, 2, replace=False))
        edges.add((names[a], names[b]))
    edges = sorted(edges)
    comps = [Component(f"N{i:02d}", "distribution_node", ("node", x), (0.0, 0.0)) for i, x in enumerate(names)]
    comps += [Component(f"E{i:02d}", "line_segment", ("edge", e), (0.0, 0.0)) for i, e in enumerate(edges)]
    n_damaged = min(n_damaged, len(comps))
    hit = rng.choice(len(comps), n_damaged, replace=False)
    if integer:
        dur = rng.integers(1, 7, size=n_damaged).astype(float)
    else:
        dur = np.round(rng.uniform(0.5, 6.0, size=n_damaged), 3)
    durations = {comps[i].id: float(d) for i, d in zip(hit, dur)}
    cell_nodes = names[1:]
    pops = rng.integers(0, 1000, size=len(cell_nodes))
    if pops.sum() == 0:
        pops[0] = 1
    ret_nodes = [names[int(k)] for k in rng.integers(0, n_nodes, size=n_retailers)]
    tt = rng.uniform(0, 20, size=(len(cell_nodes), n_retailers))
    community = community_on(cell_nodes, pops, [(x, float(rng.uniform(0.5, 2))) for x in ret_nodes], tt=tt)
    network = build_network(names, edges, [names[0]], comps,
                            {**{x: "cell" for x in cell_nodes}, **{x: "retailer" for x in ret_nodes}})
    return problem_from(network, community, durations, n_units, mode, gamma)


@pytest.fixture(scope="session")
def gilroy():
    return load_config("gilroy")


@pytest.fixture(scope="session")
def toy():
    return load_config("toy")
