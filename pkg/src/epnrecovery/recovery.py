"""Decision epochs, work-conserving repair progress, benefit and objectives.

Repair progress is frozen, never lost: a component dropped from the active
assignment keeps its remaining duration until it is assigned again. A decision
epoch ends when at least one assigned component completes; every assigned
component finishing at that instant completes in the same epoch.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal

import numpy as np

from . import kernels
from .community import CommunityModel
from .epn import PowerNetwork, community_arrays, scenario_damaged_mask
from .errors import (
    CombinatorialBudgetError,
    ContractViolation,
    DegenerateTrajectoryError,
    ModelDefinitionError,
)
from .fragility import DamageScenario

BenefitMode = Literal["households", "combined"]
MODES = {"households": kernels.HOUSEHOLDS, "combined": kernels.COMBINED}
DEFAULT_ACTION_BUDGET = 100_000


@dataclass(frozen=True, eq=False)
class RecoveryProblem:
    """Everything fixed during one recovery: network, community, damage, N."""

    network: PowerNetwork
    community: CommunityModel
    scenario: DamageScenario
    n_units: int
    mode: BenefitMode = "combined"
    gamma: float = 0.8

    def __post_init__(self):
        if int(self.n_units) != self.n_units or self.n_units < 1:
            raise ModelDefinitionError("number of resource units must be a positive integer")
        if self.mode not in MODES:
            raise ModelDefinitionError(f"benefit mode must be one of {sorted(MODES)}")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")

    @property
    def population(self) -> int:
        return self.community.total_population

    @property
    def threshold(self) -> float:
        return self.gamma * self.population

    @cached_property
    def durations(self) -> np.ndarray:
        """Scenario repair durations in network component order (0 = undamaged)."""
        mask = scenario_damaged_mask(self.network, self.scenario)
        by_id = dict(zip(self.scenario.component_ids, self.scenario.durations))
        d = np.array([by_id.get(c.id, 0.0) if hit else 0.0
                      for c, hit in zip(self.network.components, mask)], dtype=np.float64)
        d.setflags(write=False)
        return d

    @cached_property
    def kernel_args(self) -> tuple:
        """Trailing kernel arguments: graph arrays, community arrays, mode."""
        return (*self.network.graph_arrays,
                *community_arrays(self.network, self.community),
                MODES[self.mode])

    @property
    def component_ids(self) -> tuple[str, ...]:
        return self.network.component_ids

    def served(self, remaining: np.ndarray) -> float:
        return float(kernels.served(remaining, *self.kernel_args))

    def initial_state(self) -> "RecoveryState":
        remaining = self.durations.copy()
        h0 = self.served(remaining)
        reach = 0.0 if h0 >= self.threshold else math.inf
        return RecoveryState(self, 0.0, remaining, frozenset(), h0, 0.0, reach)


@dataclass(frozen=True, eq=False)
class RecoveryState:
    """Clock, per-component remaining work and running objective accumulators.

    ``remaining`` is indexed by network component and is 0 for functional
    components. ``weighted`` is the running sum of served * interval and
    ``reach`` the clock at which the service threshold was first met
    (``inf`` while unmet).
    """

    problem: RecoveryProblem
    clock: float
    remaining: np.ndarray
    in_progress: frozenset
    served: float
    weighted: float = 0.0
    reach: float = math.inf

    def __post_init__(self):
        self.remaining.setflags(write=False)

    @cached_property
    def damaged_index(self) -> np.ndarray:
        return np.flatnonzero(self.remaining > 0)

    @property
    def damaged(self) -> frozenset:
        ids = self.problem.component_ids
        return frozenset(ids[i] for i in self.damaged_index)

    @property
    def repaired(self) -> frozenset:
        ids = self.problem.component_ids
        done = (self.problem.durations > 0) & (self.remaining == 0)
        return frozenset(ids[i] for i in np.flatnonzero(done))

    @property
    def terminal(self) -> bool:
        return self.damaged_index.size == 0

    def remaining_of(self, component_id: str) -> float:
        return float(self.remaining[self.problem.network.component_index[component_id]])


@dataclass(frozen=True, order=True)
class RepairAction:
    """Components receiving one resource unit each, as sorted ids."""

    assigned: tuple

    def __post_init__(self):
        object.__setattr__(self, "assigned", tuple(sorted(self.assigned)))

    def __str__(self) -> str:
        return "+".join(self.assigned)


def action_indices(problem: RecoveryProblem, action: RepairAction) -> np.ndarray:
    idx = problem.network.component_index
    try:
        return np.array(sorted(idx[c] for c in action.assigned), dtype=np.int64)
    except KeyError as exc:
        raise ContractViolation(f"unknown component {exc.args[0]}") from None


def action_from_indices(problem: RecoveryProblem, indices) -> RepairAction:
    ids = problem.component_ids
    return RepairAction(tuple(ids[int(i)] for i in indices))


def enumerate_index_actions(state: RecoveryState, n_units: int, budget: int = DEFAULT_ACTION_BUDGET) -> np.ndarray:
    """All size-min(N, |D|) subsets as a ``(count, k)`` index array, lexicographic."""
    damaged = state.damaged_index
    if damaged.size == 0:
        raise ContractViolation("no damaged components left")
    k = min(n_units, damaged.size)
    count = math.comb(damaged.size, k)
    if count > budget:
        raise CombinatorialBudgetError(
            f"C({damaged.size}, {k}) = {count} actions exceeds budget {budget}"
        )
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(damaged.tolist(), k)),
        dtype=np.int64,
        count=count * k,
    )
    return combos.reshape(count, k)


def enumerate_actions(state: RecoveryState, n_units: int, budget: int = DEFAULT_ACTION_BUDGET) -> list[RepairAction]:
    """Every admissible action at ``state`` in lexicographic id order."""
    return [action_from_indices(state.problem, row)
            for row in enumerate_index_actions(state, n_units, budget)]


def advance(state: RecoveryState, action: RepairAction) -> tuple[RecoveryState, float, frozenset]:
    """Work on ``action`` until the first completion.

    Returns ``(next_state, elapsed_days, completed_ids)``.
    """
    problem = state.problem
    chosen = action_indices(problem, action)
    damaged = state.damaged_index
    expected = min(problem.n_units, damaged.size)
    if chosen.size != expected or len(set(chosen.tolist())) != chosen.size:
        raise ContractViolation(f"action must assign exactly {expected} distinct components")
    if not np.all(state.remaining[chosen] > 0):
        raise ContractViolation("action assigns a component that is not damaged")
    remaining = state.remaining.copy()
    dt = float(kernels.apply_action(remaining, chosen))
    done = chosen[remaining[chosen] == 0]
    clock = state.clock + dt
    h = problem.served(remaining)
    weighted = state.weighted + h * dt
    reach = state.reach
    if reach == math.inf and h >= problem.threshold:
        reach = clock
    ids = problem.component_ids
    completed = frozenset(ids[i] for i in done)
    in_progress = frozenset(ids[i] for i in chosen) - completed
    nxt = RecoveryState(problem, clock, remaining, in_progress, h, weighted, reach)
    return nxt, dt, completed


def benefit(state: RecoveryState | np.ndarray, problem: RecoveryProblem | None = None,
            mode: BenefitMode | None = None) -> float:
    """Persons served at a state (or a remaining-work / functional vector).

    Households mode counts energized cells; combined mode weights each
    energized cell by the expected share of its residents whose retailer is
    also energized.
    """
    if isinstance(state, RecoveryState):
        problem = state.problem
        remaining = state.remaining
    else:
        vec = np.asarray(state)
        remaining = np.where(vec, 0.0, 1.0) if vec.dtype == bool else vec.astype(np.float64)
    if problem is None:
        raise ValueError("problem required when passing a raw vector")
    args = list(problem.kernel_args)
    if mode is not None:
        args[-1] = MODES[mode]
    return float(kernels.served(remaining, *args))


@dataclass(frozen=True)
class Epoch:
    action: RepairAction
    k: float
    served: float
    clock: float
    completed: tuple


@dataclass(eq=False)
class Trajectory:
    """Ordered completion epochs plus the pre-repair service level."""

    population: int
    initial_served: float
    n_units: int
    n_damaged: int
    epochs: list[Epoch] = field(default_factory=list)

    @property
    def makespan(self) -> float:
        return self.epochs[-1].clock if self.epochs else 0.0

    @property
    def t_end(self) -> int:
        """1-based epoch after which at most N components remain damaged."""
        left = self.n_damaged
        if left <= self.n_units:
            return 0
        for t, ep in enumerate(self.epochs, start=1):
            left -= len(ep.completed)
            if left <= self.n_units:
                return t
        return len(self.epochs)

    @property
    def served_series(self) -> np.ndarray:
        return np.array([e.served for e in self.epochs], dtype=np.float64)

    @property
    def clocks(self) -> np.ndarray:
        return np.array([e.clock for e in self.epochs], dtype=np.float64)

    @property
    def repair_order(self) -> list[str]:
        return [c for e in self.epochs for c in e.completed]


class Unreached(float):
    """Objective-1 sentinel: compares above every reached value.

    ``final_clock`` records when the trajectory ended without meeting the
    threshold.
    """

    def __new__(cls, final_clock: float):
        obj = super().__new__(cls, math.inf)
        obj.final_clock = float(final_clock)
        return obj

    def __repr__(self) -> str:
        return f"Unreached(final_clock={self.final_clock!r})"


def objective1(trajectory: Trajectory, gamma: float, p: float | None = None) -> float:
    """Days until at least ``gamma * p`` persons are served."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if p is None:
        p = trajectory.population
    threshold = gamma * p
    if trajectory.initial_served >= threshold:
        return 0.0
    for ep in trajectory.epochs:
        if ep.served >= threshold:
            return ep.clock
    return Unreached(trajectory.makespan)


def objective2(trajectory: Trajectory) -> float:
    """Sum of served * interval over epochs, divided by the makespan."""
    if not trajectory.epochs or trajectory.makespan <= 0:
        raise DegenerateTrajectoryError("objective 2 undefined for zero makespan")
    acc = 0.0
    for ep in trajectory.epochs:
        acc = acc + ep.served * ep.k
    return acc / trajectory.makespan


Decider = Callable[[RecoveryState], RepairAction]


def simulate_policy(problem: RecoveryProblem, policy) -> Trajectory:
    """Run ``policy`` from the post-event state to full restoration.

    ``policy`` is a :class:`~epnrecovery.policies.Policy` (or anything with a
    ``start(problem)`` method returning a decider).
    """
    decide: Decider = policy.start(problem)
    state = problem.initial_state()
    traj = Trajectory(problem.population, state.served, problem.n_units, int(state.damaged_index.size))
    while not state.terminal:
        action = decide(state)
        state, dt, completed = advance(state, action)
        traj.epochs.append(Epoch(action, dt, state.served, state.clock, tuple(sorted(completed))))
    return traj

