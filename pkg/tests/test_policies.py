import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_problem
from epnrecovery.errors import ConfigurationError, OracleUnavailableError
from epnrecovery.policies import (
    ExactDP,
    RandomBase,
    Rollout,
    SmartBase,
    exact_dp,
    parse_policy,
    random_base_action,
    rollout_action,
    rollout_policy,
    smart_base_action,
)
from epnrecovery.recovery import RepairAction, objective1, objective2, simulate_policy
from test_recovery import star


def test_random_full_set_when_n_covers():
    p = star({"a": 1, "b": 2}, {"a": 1, "b": 1})
    rng = np.random.default_rng(0)
    assert random_base_action(p.initial_state(), 2, rng).assigned == ("a", "b")


def test_random_uniform_over_subsets():
    p = star({"a": 1, "b": 2, "c": 3}, {"a": 1, "b": 1, "c": 1})
    s = p.initial_state()
    rng = np.random.default_rng(123)
    counts = Counter(random_base_action(s, 2, rng).assigned for _ in range(30_000))
    assert set(counts) == {("a", "b"), ("a", "c"), ("b", "c")}
    for v in counts.values():
        assert abs(v / 30_000 - 1 / 3) < 0.01


def test_random_deterministic_given_seed():
    p = star({x: 1.0 for x in "abcdef"}, {x: 1 for x in "abcdef"})
    s = p.initial_state()
    a = [random_base_action(s, 2, np.random.default_rng(9)) for _ in range(3)]
    assert a[0] == a[1] == a[2]


def test_smart_dominant_and_ties():
    p = star({"a": 1, "b": 1, "c": 1}, {"a": 5, "b": 10_000, "c": 5}, n_units=1)
    assert smart_base_action(p.initial_state(), 1).assigned == ("b",)
    p = star({"c": 1, "a": 1, "b": 1}, {"a": 7, "b": 7, "c": 7})
    assert smart_base_action(p.initial_state(), 2).assigned == ("a", "b")


def test_smart_matches_importance_oracle():
    for seed in range(40):
        p = random_problem(np.random.default_rng(seed), 7, 2)
        s = p.initial_state()
        want = oracles.smart_pick(p, oracles.damaged_durations(p))
        assert smart_base_action(s, 2).assigned == tuple(sorted(want))


def test_rollout_single_candidate():
    p = star({"a": 2, "b": 3}, {"a": 1, "b": 1})
    action, ests = rollout_action(p.initial_state(), SmartBase(), 1, 1, np.random.default_rng(0))
    assert action.assigned == ("a", "b") and len(ests) == 1


def _one_step_then_smart(p, first):
    def choose(remaining, clock):
        if clock == 0.0:
            return first
        return oracles.smart_pick(p, remaining)
    return oracles.simulate(p, choose)


def test_rollout_smart_m4_n1_hand_enumeration():
    checked = 0
    for seed in range(60):
        p = random_problem(np.random.default_rng(seed), 4, 1)
        dmg = oracles.damaged_durations(p)
        if len(dmg) != 4:
            continue
        for objective in (1, 2):
            values = []
            for c in sorted(dmg):
                h0, ev = _one_step_then_smart(p, [c])
                values.append(oracles.f1_of(h0, ev, p.threshold) if objective == 1 else oracles.f2_of(ev))
            best = int(np.argmin(values) if objective == 1 else np.argmax(values))
            action, ests = rollout_action(p.initial_state(), SmartBase(), objective, 1, np.random.default_rng(0))
            assert action.assigned == (sorted(dmg)[best],)
            assert [e.value for e in ests] == pytest.approx(values, abs=1e-9)
            assert all(e.sample_count == 1 and e.sample_std == 0.0 for e in ests)
        checked += 1
    assert checked >= 20


def test_smart_base_estimates_do_not_depend_on_q():
    p = random_problem(np.random.default_rng(4), 6, 2)
    s = p.initial_state()
    a1, e1 = rollout_action(s, SmartBase(), 2, 1, np.random.default_rng(0))
    a2, e2 = rollout_action(s, SmartBase(), 2, 100, np.random.default_rng(1))
    assert a1 == a2 and e1 == e2


def test_random_base_estimates_carry_q():
    p = random_problem(np.random.default_rng(5), 6, 2)
    _, ests = rollout_action(p.initial_state(), RandomBase(), 1, 17, np.random.default_rng(0))
    assert all(e.sample_count == 17 and math.isfinite(e.value) for e in ests)


def test_common_random_numbers_give_equal_estimates_for_equivalent_candidates():
    # two interchangeable leaves: swapping them leaves every completion's value unchanged
    p = star({"a": 2, "b": 2, "c": 5}, {"a": 10, "b": 10, "c": 3}, n_units=1)
    _, ests = rollout_action(p.initial_state(), RandomBase(), 2, 30, np.random.default_rng(2))
    by = {e.action.assigned: e.value for e in ests}
    assert by[("a",)] == by[("b",)]


def test_rollout_forced_move():
    p = star({"a": 2, "b": 3, "c": 4}, {"a": 1, "b": 1, "c": 1}, n_units=3)
    t = simulate_policy(p, Rollout(RandomBase(), 1, 5, seed=0))
    assert t.epochs[0].action.assigned == ("a", "b", "c")


def test_rollout_policy_factory_and_names():
    r = rollout_policy(SmartBase(), 2, 7, seed=3)
    assert r.name == "rollout:base=smart,Q=7,objective=2" and r.seed == 3
    assert str(RandomBase()) == "random" and ExactDP(2).name == "exact:objective=2"
    with pytest.raises(ConfigurationError):
        Rollout(RandomBase(), 1, 0)
    with pytest.raises(ConfigurationError):
        Rollout(RandomBase(), 3, 5)


def test_rollout_deterministic_given_seed():
    p = random_problem(np.random.default_rng(8), 8, 2, "combined")
    a = simulate_policy(p, Rollout(RandomBase(), 1, 10, seed=5))
    b = simulate_policy(p, Rollout(RandomBase(), 1, 10, seed=5))
    assert [e.action for e in a.epochs] == [e.action for e in b.epochs]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 9), st.integers(1, 3), st.sampled_from(["households", "combined"]))
def test_smart_rollout_dominates_base(seed, m, n, mode):
    p = random_problem(np.random.default_rng(seed), m, n, mode, integer=False)
    base = simulate_policy(p, SmartBase())
    r1 = simulate_policy(p, Rollout(SmartBase(), 1, 1))
    r2 = simulate_policy(p, Rollout(SmartBase(), 2, 1))
    assert objective1(r1, p.gamma) <= objective1(base, p.gamma)
    if base.makespan > 0:
        assert objective2(r2) >= objective2(base)


def test_exact_single_component():
    p = star({"a": 6}, {"a": 10, "b": 1}, n_units=1)
    for obj in (1, 2):
        value, plan = exact_dp(p, obj)
        assert plan == [RepairAction(("a",))]
    assert exact_dp(p, 1)[0] == 6.0


def test_exact_no_damage():
    p = star({}, {"a": 1})
    assert exact_dp(p, 1) == (0.0, [])


def test_exact_m5_n1_matches_all_orders():
    for seed in range(15):
        rng = np.random.default_rng(100 + seed)
        dur = {x: float(d) for x, d in zip("abcde", rng.integers(1, 9, 5))}
        p = star(dur, {x: 1 for x in "abcdef"}, n_units=1, gamma=float(rng.choice([0.5, 0.6, 0.8])))
        value, plan = exact_dp(p, 1)
        assert value == oracles.permutation_optimum(p)
        assert len(plan) == 5


def _replay_oracle(p, plan):
    steps = iter(plan)
    return oracles.simulate(p, lambda remaining, clock: next(steps).assigned)


@pytest.mark.parametrize("n_units", [1, 2])
def test_exact_matches_exhaustive_tree(n_units):
    for seed in range(8):
        p = random_problem(np.random.default_rng(200 + seed), 6, n_units)
        for obj in (1, 2):
            want, _ = oracles.brute_force(p, obj)
            value, plan = exact_dp(p, obj)
            assert value == want
            h0, ev = _replay_oracle(p, plan)
            got = oracles.f1_of(h0, ev, p.threshold) if obj == 1 else oracles.f2_of(ev)
            assert got == want


def test_exact_budget_raises():
    p = random_problem(np.random.default_rng(1), 12, 2)
    with pytest.raises(OracleUnavailableError):
        exact_dp(p, 1, budget=10)


def test_exact_policy_replays_plan():
    p = random_problem(np.random.default_rng(2), 5, 2)
    value, plan = exact_dp(p, 2)
    t = simulate_policy(p, ExactDP(2))
    assert [e.action for e in t.epochs] == plan and objective2(t) == value


@pytest.mark.parametrize("spec,name", [
    ("random", "random"),
    ("smart", "smart"),
    ("rollout:base=random,Q=30", "rollout:base=random,Q=30,objective=1"),
    ("rollout:base=smart,Q=1,objective=2", "rollout:base=smart,Q=1,objective=2"),
    ("rollout", "rollout:base=random,Q=30,objective=1"),
    ("exact", "exact:objective=1"),
    ("exact:objective=2", "exact:objective=2"),
])
def test_parse_policy(spec, name):
    assert parse_policy(spec).name == name


@pytest.mark.parametrize("spec", ["greedy", "random:Q=3", "rollout:base=exact", "rollout:Z=1", "rollout:Q",
                                  "exact:Q=3"])
def test_parse_policy_rejects(spec):
    with pytest.raises(ConfigurationError):
        parse_policy(spec)


def test_parse_policy_objective_default():
    assert parse_policy("rollout:base=smart", objective=2).objective == 2
