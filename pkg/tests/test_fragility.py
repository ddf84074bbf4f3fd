import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epnrecovery.config import sample_damage
from epnrecovery.errors import ConfigurationError, ModelConsistencyError, ModelDefinitionError
from epnrecovery.fragility import (
    DamageScenario,
    DamageState,
    FragilitySet,
    RestorationTable,
    exceedance_matrix,
    occupancy_probs,
    prob_exceed,
    sample_damage_state,
    sample_damage_states,
    sample_scenario,
)
from epnrecovery.hazard import IMField

# Phi(ln 2 / 0.5) evaluated with mpmath at 30 digits
PHI_LN2_OVER_HALF = 0.9171714809983015

FSET = FragilitySet("line_segment", [0.28, 0.40, 0.70, 1.10], [0.5] * 4)


def test_half_at_median():
    for k in range(4):
        assert prob_exceed(k + 1, FSET.medians[k], FSET) == 0.5


def test_independent_normal_cdf_value():
    f = FragilitySet("x", [0.3, 0.4, 0.5, 0.6], [0.5] * 4)
    assert prob_exceed(1, 0.6, f) == pytest.approx(PHI_LN2_OVER_HALF, abs=1e-15)
    erfc_form = 0.5 * math.erfc(-math.log(2) / 0.5 / math.sqrt(2))
    assert prob_exceed(1, 0.6, f) == pytest.approx(erfc_form, abs=1e-15)


def test_vanishes_near_zero_pga():
    assert prob_exceed(1, 1e-9, FSET) < 1e-12


def test_domain_errors():
    with pytest.raises(ValueError):
        prob_exceed(1, 0.0, FSET)
    with pytest.raises(ValueError):
        prob_exceed(0, 0.5, FSET)
    with pytest.raises(ValueError):
        sample_damage_state(0.5, FSET, 1.0)


def test_sample_extremes():
    assert sample_damage_state(50.0, FSET, 0.999) == DamageState.COMPLETE
    assert sample_damage_state(0.5, FSET, 0.0) == DamageState.COMPLETE
    assert sample_damage_state(1e-6, FSET, 0.5) == DamageState.NONE


def test_inverse_cdf_boundaries():
    ex = [prob_exceed(k, 0.5, FSET) for k in range(1, 5)]
    for k, p in enumerate(ex, start=1):
        assert sample_damage_state(0.5, FSET, np.nextafter(p, 0)) >= k
        assert sample_damage_state(0.5, FSET, p) < k


def test_crossing_curves_rejected():
    crossing = FragilitySet("x", [0.2, 0.3, 0.4, 0.5], [0.1, 2.0, 0.1, 0.1])
    with pytest.raises(ModelConsistencyError):
        sample_damage_state(5.0, crossing, 0.5)
    with pytest.raises(ModelConsistencyError):
        occupancy_probs(5.0, crossing)


def test_occupancy_frequencies_match():
    for pga in (0.2, 0.45, 0.9):
        u = np.random.default_rng(1).random(100_000)
        states = sample_damage_states(np.full(u.size, pga), FSET, u)
        freq = np.bincount(states, minlength=5) / u.size
        assert np.max(np.abs(freq - occupancy_probs(pga, FSET))) < 0.01


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 10), st.floats(1e-3, 10))
def test_occupancy_and_stochastic_ordering(a, b):
    occ = occupancy_probs(a, FSET)
    assert np.all(occ >= 0)
    assert abs(occ.sum() - 1) <= 1e-12
    lo, hi = sorted((a, b))
    for k in range(1, 5):
        assert prob_exceed(k, hi, FSET) >= prob_exceed(k, lo, FSET)


@pytest.mark.parametrize("bad", [
    lambda: FragilitySet("x", [0.3, 0.2, 0.5, 0.6], [0.5] * 4),
    lambda: FragilitySet("x", [0.3, 0.3, 0.5, 0.6], [0.5] * 4),
    lambda: FragilitySet("x", [0.3, 0.4, 0.5, 0.6], [0.5, 0.5, 0.0, 0.5]),
    lambda: FragilitySet("x", [0.3, 0.4, 0.5], [0.5] * 3),
    lambda: RestorationTable("x", [1.0, 0.5, 2.0, 3.0]),
    lambda: RestorationTable("x", [1.0, 1.0, 2.0, 3.0, 4.0]),
])
def test_invalid_tables(bad):
    with pytest.raises(ModelDefinitionError):
        bad()


def test_restoration_table_prepends_ds0():
    np.testing.assert_array_equal(RestorationTable("x", [1, 2, 4, 7]).days, [0, 1, 2, 4, 7])


def _field(pga):
    return IMField(np.asarray(pga, dtype=float), 0.0)


def test_weak_shaking_leaves_nothing_damaged():
    sc = sample_scenario(_field([1e-5] * 6), [f"c{i}" for i in range(6)], ["line_segment"] * 6,
                         {"line_segment": FSET}, {"line_segment": RestorationTable("x", [1, 2, 4, 7])}, 3)
    assert sc.damaged == ()
    assert np.all(sc.durations == 0)


def test_scenario_determinism_and_lookup():
    rt = RestorationTable("x", [1, 2, 4, 7])
    args = (_field(np.linspace(0.1, 1.5, 8)), [f"c{i}" for i in range(8)], ["line_segment"] * 8,
            {"line_segment": FSET}, {"line_segment": rt}, 5)
    a, b = sample_scenario(*args), sample_scenario(*args)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.durations, rt.days[a.states])
    assert set(a.damaged) == {cid for cid, s in zip(a.component_ids, a.states) if s >= 1}


def test_missing_class_is_configuration_error():
    with pytest.raises(ConfigurationError):
        sample_scenario(_field([0.5]), ["c"], ["tower"], {"line_segment": FSET},
                        {"line_segment": RestorationTable("x", [1, 2, 4, 7])}, 0)


def test_from_durations():
    sc = DamageScenario.from_durations(["a", "b", "c"], [0, 2.5, 1])
    assert sc.damaged == ("b", "c")
    assert list(sc.states) == [0, 4, 4]


def test_bundled_marginals(gilroy):
    """Per-component damage-state frequencies match the analytic marginals
    given each scenario's own intensity (10^4 scenarios, 3% absolute)."""
    n = 10_000
    comps = gilroy.network.components
    classes = np.array([c.component_class for c in comps])
    counts = np.zeros((len(comps), 5))
    expected = np.zeros((len(comps), 5))
    for i in range(n):
        sc = sample_damage(gilroy, 0, i)
        counts[np.arange(len(comps)), sc.states] += 1
        for cls, fset in gilroy.fragilities.items():
            idx = np.flatnonzero(classes == cls)
            ex = exceedance_matrix(sc.field.pga[idx], fset)
            expected[idx] += np.hstack([1 - ex[:, :1], ex[:, :-1] - ex[:, 1:], ex[:, -1:]])
        assert np.all((sc.durations > 0) == (sc.states >= 1))
    assert np.max(np.abs(counts - expected)) / n < 0.03
