"""Repair policies: base heuristics, rollout, and an exact DP oracle."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, OracleUnavailableError
from .recovery import (
    DEFAULT_ACTION_BUDGET,
    Epoch,
    RecoveryProblem,
    RecoveryState,
    RepairAction,
    Trajectory,
    action_from_indices,
    advance,
    enumerate_index_actions,
    objective1,
    objective2,
)


@dataclass(frozen=True)
class CostToGoEstimate:
    action: RepairAction
    value: float
    sample_count: int
    sample_std: float


class Policy:
    """A policy is started once per trajectory and then queried per epoch."""

    name = "policy"
    seed: int | None = None

    def start(self, problem: RecoveryProblem):
        raise NotImplementedError

    def reseeded(self, seed: int) -> "Policy":
        return dataclasses.replace(self, seed=seed)

    def __str__(self) -> str:
        return self.name


def random_base_action(state: RecoveryState, n_units: int, rng: np.random.Generator) -> RepairAction:
    """Uniformly random size-min(N, |D|) subset of the damaged set."""
    damaged = state.damaged_index
    k = min(n_units, damaged.size)
    if k == damaged.size:
        return action_from_indices(state.problem, damaged)
    u = rng.random(k)
    return action_from_indices(state.problem, kernels.random_choice(damaged, k, u, 0))


def smart_base_action(state: RecoveryState, n_units: int) -> RepairAction:
    """Top-ranked components by one-step unblock importance."""
    problem = state.problem
    damaged = state.damaged_index
    k = min(n_units, damaged.size)
    if k == damaged.size:
        return action_from_indices(problem, damaged)
    args = problem.kernel_args[:-1]
    chosen = kernels.smart_choice(np.array(state.remaining), damaged, k, *args)
    return action_from_indices(problem, chosen)


@dataclass(frozen=True)
class RandomBase(Policy):
    seed: int | None = 0

    @property
    def name(self) -> str:
        return "random"

    def start(self, problem):
        rng = np.random.default_rng(self.seed)
        return lambda state: random_base_action(state, problem.n_units, rng)


@dataclass(frozen=True)
class SmartBase(Policy):
    seed: int | None = 0

    @property
    def name(self) -> str:
        return "smart"

    def start(self, problem):
        return lambda state: smart_base_action(state, problem.n_units)


def _base_kind(base: Policy) -> int:
    if isinstance(base, RandomBase):
        return kernels.RANDOM_BASE
    if isinstance(base, SmartBase):
        return kernels.SMART_BASE
    raise ConfigurationError(f"unsupported rollout base heuristic {base!r}")


def rollout_action(
    state: RecoveryState,
    base: Policy,
    objective: int,
    samples: int,
    rng: np.random.Generator,
    budget: int = DEFAULT_ACTION_BUDGET,
) -> tuple[RepairAction, list[CostToGoEstimate]]:
    """One rollout step: score every candidate by completing it with ``base``.

    Each candidate is applied, then the base heuristic runs to full
    restoration; the objective of the whole trajectory (executed prefix,
    candidate, base suffix) is averaged over ``samples`` completions that share
    the same random streams across candidates. Deterministic bases use a
    single completion.
    """
    if objective not in (1, 2):
        raise ValueError("objective must be 1 or 2")
    if samples < 1:
        raise ValueError("rollout needs at least one sample")
    problem = state.problem
    candidates = enumerate_index_actions(state, problem.n_units, budget)
    kind = _base_kind(base)
    n_damaged = state.damaged_index.size
    if kind == kernels.RANDOM_BASE:
        streams = rng.random((samples, max(1, n_damaged * problem.n_units)))
    else:
        streams = np.zeros((1, 1))
    values = kernels.evaluate_candidates(
        candidates, np.array(state.remaining), state.clock, state.weighted, state.reach, kind,
        streams, problem.n_units, problem.threshold, objective, *problem.kernel_args,
    )
    with np.errstate(invalid="ignore"):
        means = values.mean(axis=1)
        stds = values.std(axis=1) if values.shape[1] > 1 else np.zeros(len(values))
    best = int(np.argmin(means) if objective == 1 else np.argmax(means))
    estimates = [
        CostToGoEstimate(action_from_indices(problem, row), float(m), values.shape[1],
                         float(s) if np.isfinite(s) else 0.0)
        for row, m, s in zip(candidates, means, stds)
    ]
    return estimates[best].action, estimates


@dataclass(frozen=True)
class Rollout(Policy):
    base: Policy = RandomBase()
    objective: int = 1
    samples: int = 30
    seed: int | None = 0
    budget: int = DEFAULT_ACTION_BUDGET

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigurationError("rollout samples Q must be >= 1")
        if self.objective not in (1, 2):
            raise ConfigurationError("objective must be 1 or 2")
        _base_kind(self.base)

    @property
    def name(self) -> str:
        return f"rollout:base={self.base.name},Q={self.samples},objective={self.objective}"

    def start(self, problem, log: list | None = None):
        rng = np.random.default_rng(self.seed)

        def decide(state):
            action, estimates = rollout_action(state, self.base, self.objective, self.samples, rng, self.budget)
            if log is not None:
                log.append(estimates)
            return action

        return decide


def rollout_policy(base: Policy, objective: int, samples: int, seed: int = 0) -> Rollout:
    return Rollout(base=base, objective=objective, samples=samples, seed=seed)


# --------------------------------------------------------------------------
# exact dynamic programming


def _key(remaining: np.ndarray) -> bytes:
    return remaining.tobytes()


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.states = 0

    def tick(self):
        self.states += 1
        if self.states > self.limit:
            raise OracleUnavailableError(f"exact DP state space exceeds budget of {self.limit} states")


def _children(problem: RecoveryProblem, remaining: np.ndarray, budget: int):
    state = RecoveryState(problem, 0.0, remaining.copy(), frozenset(), 0.0)
    for row in enumerate_index_actions(state, problem.n_units, budget):
        nxt = remaining.copy()
        dt = float(kernels.apply_action(nxt, row))
        yield row, dt, nxt, problem.served(nxt)


def _dp_time_to_threshold(problem, budget, action_budget):
    """Objective 1: J(rem) = min_a dt + J(rem'), J = 0 once served >= threshold."""
    memo: dict[bytes, tuple[float, np.ndarray | None]] = {}
    thr = problem.threshold

    def solve(rem: np.ndarray) -> float:
        key = _key(rem)
        if key in memo:
            return memo[key][0]
        budget.tick()
        if not np.any(rem > 0):
            memo[key] = (math.inf, None)
            return math.inf
        best, best_row = math.inf, None
        for row, dt, nxt, h in _children(problem, rem, action_budget):
            value = dt + (0.0 if h >= thr else solve(nxt))
            if best_row is None or value < best:
                best, best_row = value, row
        memo[key] = (best, best_row)
        return best

    def policy_row(rem: np.ndarray):
        key = _key(rem)
        if key not in memo:
            solve(rem)
        return memo[key][1]

    return solve, policy_row


def _dp_frontier(problem, budget, action_budget):
    """Objective 2: Pareto set of (weighted service, elapsed time) per state.

    Service-per-time is a ratio of two additive quantities, so a scalar
    Bellman value does not exist; the set of nondominated (more service,
    less time) continuations does compose and is exact.
    """
    memo: dict[bytes, list] = {}

    def solve(rem: np.ndarray) -> list:
        key = _key(rem)
        if key in memo:
            return memo[key]
        budget.tick()
        if not np.any(rem > 0):
            memo[key] = [(0.0, 0.0, ())]
            return memo[key]
        points = []
        for row, dt, nxt, h in _children(problem, rem, action_budget):
            head = tuple(int(i) for i in row)
            gain = h * dt
            for a, c, tail in solve(nxt):
                points.append((gain + a, dt + c, (head,) + tail))
        points.sort(key=lambda p: (p[1], -p[0], p[2]))
        front, best_a = [], -math.inf
        for p in points:
            if p[0] > best_a:
                front.append(p)
                best_a = p[0]
        memo[key] = front
        return front

    return solve


def _replay(problem: RecoveryProblem, rows) -> Trajectory:
    state = problem.initial_state()
    traj = Trajectory(problem.population, state.served, problem.n_units, int(state.damaged_index.size))
    for row in rows:
        action = action_from_indices(problem, row)
        state, dt, completed = advance(state, action)
        traj.epochs.append(Epoch(action, dt, state.served, state.clock, tuple(sorted(completed))))
    return traj


def exact_dp(
    problem: RecoveryProblem,
    objective: int,
    budget: int = 200_000,
    action_budget: int = DEFAULT_ACTION_BUDGET,
) -> tuple[float, list[RepairAction]]:
    """Optimal objective value and one optimal action string.

    States are remaining-work profiles: with frozen progress and fixed
    durations, the best continuation does not depend on the clock or on
    the path taken. Ties go to the lexicographically first action. The
    reported value is the objective of the returned string.
    """
    if objective not in (1, 2):
        raise ValueError("objective must be 1 or 2")
    counter = _Budget(budget)
    root = problem.durations.copy()
    if not np.any(root > 0):
        return 0.0, []
    rows: list[np.ndarray] = []
    if objective == 1:
        solve, policy_row = _dp_time_to_threshold(problem, counter, action_budget)
        rem = root.copy()
        reached = problem.served(rem) >= problem.threshold
        if not reached:
            solve(rem)
        while np.any(rem > 0):
            if reached:
                row = enumerate_index_actions(
                    RecoveryState(problem, 0.0, rem.copy(), frozenset(), 0.0), problem.n_units, action_budget
                )[0]
            else:
                row = policy_row(rem)
            rem = rem.copy()
            kernels.apply_action(rem, row)
            rows.append(row)
            reached = reached or problem.served(rem) >= problem.threshold
        traj = _replay(problem, rows)
        value = objective1(traj, problem.gamma)
    else:
        front = _dp_frontier(problem, counter, action_budget)(root)
        best = min(front, key=lambda p: (-(p[0] / p[1]), p[2]))
        rows = [np.array(r, dtype=np.int64) for r in best[2]]
        traj = _replay(problem, rows)
        value = objective2(traj)
    return value, [action_from_indices(problem, r) for r in rows]


@dataclass(frozen=True)
class ExactDP(Policy):
    objective: int = 1
    budget: int = 200_000
    seed: int | None = 0

    @property
    def name(self) -> str:
        return f"exact:objective={self.objective}"

    def start(self, problem):
        _, plan = exact_dp(problem, self.objective, self.budget)
        steps = iter(plan)
        return lambda state: next(steps)


def parse_policy(spec: str, objective: int = 1, seed: int = 0) -> Policy:
    """Build a policy from ``random | smart | rollout:base=random,Q=30 | exact``.

    Rollout and exact policies accept ``objective=1|2``; otherwise the
    ``objective`` argument applies.
    """
    kind, _, rest = spec.strip().partition(":")
    opts = {}
    if rest:
        for part in rest.split(","):
            k, sep, v = part.partition("=")
            if not sep:
                raise ConfigurationError(f"bad policy option {part!r} in {spec!r}")
            opts[k.strip()] = v.strip()
    try:
        if kind == "random" and not opts:
            return RandomBase(seed=seed)
        if kind == "smart" and not opts:
            return SmartBase(seed=seed)
        if kind == "rollout":
            unknown = set(opts) - {"base", "Q", "objective"}
            if unknown:
                raise ConfigurationError(f"unknown rollout options {sorted(unknown)}")
            base = parse_policy(opts.get("base", "random"), objective, seed)
            return Rollout(base=base, objective=int(opts.get("objective", objective)),
                           samples=int(opts.get("Q", 30)), seed=seed)
        if kind == "exact":
            unknown = set(opts) - {"objective"}
            if unknown:
                raise ConfigurationError(f"unknown exact options {sorted(unknown)}")
            return ExactDP(objective=int(opts.get("objective", objective)), seed=seed)
    except ValueError as exc:
        raise ConfigurationError(f"bad policy spec {spec!r}: {exc}") from None
    raise ConfigurationError(f"unknown policy spec {spec!r}")
