"""Electrical power network: topology, component guards, energization."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .community import CommunityModel, expected_assignment_matrix
from .errors import ModelDefinitionError

COMPONENT_CLASSES = ("substation", "transmission_tower", "line_segment", "distribution_node")


@dataclass(frozen=True)
class Component:
    """A damageable asset guarding one node or one edge of the network.

    ``guards`` is ``("node", node_id)`` or ``("edge", (u, v))``.
    """

    id: str
    component_class: str
    guards: tuple
    site: tuple[float, float]
    damageable: bool = True

    @property
    def guards_node(self) -> bool:
        return self.guards[0] == "node"


def _edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True, eq=False)
class PowerNetwork:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    sources: tuple[str, ...]
    components: tuple[Component, ...]
    load_points: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(_edge_key(*e) for e in self.edges))
        object.__setattr__(self, "sources", tuple(self.sources))
        # index order == id order, so every lexicographic tie-break is an index tie-break
        object.__setattr__(self, "components", tuple(sorted(self.components, key=lambda c: c.id)))
        object.__setattr__(self, "load_points", dict(self.load_points))

        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ModelDefinitionError("node ids must be unique")
        if not self.sources or any(s not in node_set for s in self.sources):
            raise ModelDefinitionError("network needs at least one existing source node")
        edge_set = set()
        for u, v in self.edges:
            if u not in node_set or v not in node_set:
                raise ModelDefinitionError(f"edge {u}-{v} references an unknown node")
            if u == v or (u, v) in edge_set:
                raise ModelDefinitionError(f"duplicate or self-loop edge {u}-{v}")
            edge_set.add((u, v))
        ids = [c.id for c in self.components]
        if len(set(ids)) != len(ids):
            raise ModelDefinitionError("component ids must be unique")
        guarded = set()
        for c in self.components:
            kind, target = c.guards
            if kind == "node":
                if target not in node_set:
                    raise ModelDefinitionError(f"{c.id} guards unknown node {target}")
                key = ("node", target)
            elif kind == "edge":
                key = ("edge", _edge_key(*target))
                if key[1] not in edge_set:
                    raise ModelDefinitionError(f"{c.id} guards unknown edge {target}")
            else:
                raise ModelDefinitionError(f"{c.id}: guard kind must be node or edge")
            if key in guarded:
                raise ModelDefinitionError(f"element {key} guarded by more than one component")
            guarded.add(key)
        for node in self.load_points:
            if node not in node_set:
                raise ModelDefinitionError(f"load point {node} is not a network node")

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def component_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.components)}

    @property
    def component_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.components)

    @cached_property
    def graph_arrays(self) -> tuple[np.ndarray, ...]:
        """``(indptr, adj, adj_comp, node_comp, sources)`` for the kernels."""
        ni = self.node_index
        edge_guard = {}
        node_comp = np.full(len(self.nodes), -1, dtype=np.int64)
        for i, c in enumerate(self.components):
            if c.guards_node:
                node_comp[ni[c.guards[1]]] = i
            else:
                edge_guard[_edge_key(*c.guards[1])] = i
        nbrs = [[] for _ in self.nodes]
        for u, v in self.edges:
            g = edge_guard.get((u, v), -1)
            nbrs[ni[u]].append((ni[v], g))
            nbrs[ni[v]].append((ni[u], g))
        indptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
        adj, adj_comp = [], []
        for i, lst in enumerate(nbrs):
            lst.sort()
            indptr[i + 1] = indptr[i] + len(lst)
            adj.extend(w for w, _ in lst)
            adj_comp.extend(g for _, g in lst)
        sources = np.array([ni[s] for s in self.sources], dtype=np.int64)
        return (
            indptr,
            np.array(adj, dtype=np.int64),
            np.array(adj_comp, dtype=np.int64),
            node_comp,
            sources,
        )

    def remaining_from_functional(self, functional) -> np.ndarray:
        """Kernel encoding: 0.0 for functional components, 1.0 otherwise."""
        if isinstance(functional, Mapping):
            flags = np.array([bool(functional.get(c.id, True)) for c in self.components])
        else:
            flags = np.asarray(functional, dtype=bool)
            if flags.shape != (len(self.components),):
                raise ModelDefinitionError("functional state must cover every component")
        return np.where(flags, 0.0, 1.0)


def energized_mask(network: PowerNetwork, remaining: np.ndarray) -> np.ndarray:
    return kernels.energized_nodes(np.asarray(remaining, dtype=np.float64), *network.graph_arrays)


def energized_load_points(network: PowerNetwork, functional) -> set[str]:
    """Load points connected to a source through functional elements only.

    ``functional`` maps component id to bool (missing ids count as
    functional) or is a boolean vector in component order.
    """
    on = energized_mask(network, network.remaining_from_functional(functional))
    ni = network.node_index
    return {node for node in network.load_points if on[ni[node]]}


def energized_nodes(network: PowerNetwork, functional) -> set[str]:
    on = energized_mask(network, network.remaining_from_functional(functional))
    return {n for n, flag in zip(network.nodes, on) if flag}


def component_importance(
    network: PowerNetwork,
    community,
    scenario,
    functional=None,
) -> list[tuple[str, float]]:
    """Rank damaged components by the household population each would
    energize if it alone were repaired next.

    ``functional`` defaults to the post-event state of ``scenario``
    (every undamaged component functional). Returns ``(id, score)`` pairs,
    highest score first, ties by ascending id.
    """
    if functional is None:
        remaining = np.where(scenario_damaged_mask(network, scenario), 1.0, 0.0)
    else:
        remaining = network.remaining_from_functional(functional)
    damaged = kernels.damaged_indices(remaining)
    cell_node, cell_pop, ret_node, q = community_arrays(network, community)
    scores = kernels.unblock_scores(remaining, damaged, *network.graph_arrays, cell_node, cell_pop, ret_node, q)
    order = np.argsort(-scores, kind="mergesort")
    comps = network.components
    return [(comps[damaged[i]].id, float(scores[i])) for i in order]


def community_arrays(network: PowerNetwork, community: CommunityModel):
    """``(cell_node, cell_pop, ret_node, q)`` kernel arrays for a community."""
    ni = network.node_index
    try:
        cell_node = np.array([ni[community.cell_load_points[c.id]] for c in community.cells], dtype=np.int64)
        ret_node = np.array([ni[r.epn_load_point] for r in community.retailers], dtype=np.int64)
    except KeyError as exc:
        raise ModelDefinitionError(f"load point {exc.args[0]} is not a network node") from None
    q = expected_assignment_matrix(community) if community.retailers else np.zeros((len(cell_node), 0))
    return cell_node, community.populations, ret_node, np.ascontiguousarray(q)


def scenario_damaged_mask(network: PowerNetwork, scenario) -> np.ndarray:
    """Boolean vector in network component order from a scenario's damaged set."""
    damaged = set(scenario.damaged)
    unknown = damaged - set(network.component_index)
    if unknown:
        raise ModelDefinitionError(f"scenario names unknown components {sorted(unknown)}")
    return np.array([c.id in damaged for c in network.components])


def build_network(
    nodes: Iterable[str],
    edges: Iterable[Sequence[str]],
    sources: Iterable[str],
    components: Iterable[Component],
    load_points: Mapping[str, str] | None = None,
) -> PowerNetwork:
    return PowerNetwork(
        tuple(nodes),
        tuple(tuple(e) for e in edges),
        tuple(sources),
        tuple(components),
        dict(load_points or {}),
    )
