"""Lognormal fragility curves, damage-state sampling and restoration times."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import ConfigurationError, ModelConsistencyError, ModelDefinitionError
from .hazard import IMField


class DamageState(IntEnum):
    NONE = 0
    MINOR = 1
    MODERATE = 2
    EXTENSIVE = 3
    COMPLETE = 4


N_STATES = 5


@dataclass(frozen=True, eq=False)
class FragilitySet:
    """Medians (g) and log-standard deviations for DS1..DS4 of one class."""

    component_class: str
    medians: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        med = np.asarray(self.medians, dtype=np.float64)
        bet = np.asarray(self.betas, dtype=np.float64)
        if med.shape != (4,) or bet.shape != (4,):
            raise ModelDefinitionError(f"{self.component_class}: need 4 medians and 4 betas")
        if np.any(med <= 0) or np.any(np.diff(med) <= 0):
            raise ModelDefinitionError(
                f"{self.component_class}: medians must be positive and strictly increasing"
            )
        if np.any(bet <= 0):
            raise ModelDefinitionError(f"{self.component_class}: betas must be positive")
        object.__setattr__(self, "medians", med)
        object.__setattr__(self, "betas", bet)


@dataclass(frozen=True, eq=False)
class RestorationTable:
    """Repair duration in days for DS0..DS4; DS0 is always 0."""

    component_class: str
    days: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.days, dtype=np.float64)
        if d.shape == (4,):
            d = np.concatenate([[0.0], d])
        if d.shape != (N_STATES,):
            raise ModelDefinitionError(f"{self.component_class}: need durations for DS1..DS4")
        if d[0] != 0 or np.any(d < 0) or np.any(np.diff(d) < 0):
            raise ModelDefinitionError(
                f"{self.component_class}: durations must start at 0 and be nondecreasing"
            )
        object.__setattr__(self, "days", d)


@dataclass(frozen=True, eq=False)
class DamageScenario:
    scenario_id: int
    component_ids: tuple[str, ...]
    states: np.ndarray
    durations: np.ndarray
    field: IMField | None = None

    @property
    def damaged_mask(self) -> np.ndarray:
        return (self.states >= DamageState.MINOR) & (self.durations > 0)

    @property
    def damaged(self) -> tuple[str, ...]:
        return tuple(cid for cid, hit in zip(self.component_ids, self.damaged_mask) if hit)

    @classmethod
    def from_durations(
        cls, component_ids: Sequence[str], durations: Sequence[float], scenario_id: int = 0
    ) -> "DamageScenario":
        """Hand-built scenario: positive duration means damaged (state DS4)."""
        d = np.asarray(durations, dtype=np.float64)
        states = np.where(d > 0, int(DamageState.COMPLETE), int(DamageState.NONE))
        return cls(scenario_id, tuple(component_ids), states.astype(np.int64), d)


def prob_exceed(ds: int, pga: float, fset: FragilitySet) -> float:
    """P(state >= ds | PGA) for ds in DS1..DS4."""
    if not 1 <= int(ds) <= 4:
        raise ValueError(f"damage state must be DS1..DS4, got {ds}")
    if not pga > 0:
        raise ValueError(f"pga must be positive, got {pga}")
    k = int(ds) - 1
    return float(ndtr(np.log(pga / fset.medians[k]) / fset.betas[k]))


def exceedance_matrix(pga, fset: FragilitySet) -> np.ndarray:
    """Exceedance probabilities, shape ``(n_sites, 4)`` for DS1..DS4."""
    pga = np.asarray(pga, dtype=np.float64).reshape(-1)
    if np.any(pga <= 0):
        raise ValueError("pga must be positive")
    return ndtr(np.log(pga[:, None] / fset.medians[None, :]) / fset.betas[None, :])


def occupancy_probs(pga: float, fset: FragilitySet) -> np.ndarray:
    """P(state == ds) for DS0..DS4 at one intensity."""
    ex = exceedance_matrix([pga], fset)[0]
    _check_ordered(ex[None, :], fset)
    upper = np.concatenate([[1.0], ex])
    lower = np.concatenate([ex, [0.0]])
    return upper - lower


def _check_ordered(ex: np.ndarray, fset: FragilitySet) -> None:
    if np.any(np.diff(ex, axis=-1) > 0):
        raise ModelConsistencyError(
            f"{fset.component_class}: fragility curves cross at the sampled intensity"
        )


def sample_damage_states(pga, fset: FragilitySet, u) -> np.ndarray:
    """Vectorized inverse-CDF draw: most severe ds with ``u < P(>= ds)``."""
    ex = exceedance_matrix(pga, fset)
    _check_ordered(ex, fset)
    u = np.asarray(u, dtype=np.float64).reshape(-1, 1)
    return (u < ex).sum(axis=1).astype(np.int64)


def sample_damage_state(pga: float, fset: FragilitySet, u: float) -> DamageState:
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    return DamageState(int(sample_damage_states([pga], fset, [u])[0]))


def sample_scenario(
    field: IMField,
    component_ids: Sequence[str],
    component_classes: Sequence[str],
    fragilities: Mapping[str, FragilitySet],
    restorations: Mapping[str, RestorationTable],
    seed,
    scenario_id: int = 0,
) -> DamageScenario:
    """Sample damage for every site in ``field`` (one uniform per component)."""
    if len(component_ids) != field.pga.size or len(component_classes) != field.pga.size:
        raise ConfigurationError("component list does not match the intensity field")
    for cls in set(component_classes):
        if cls not in fragilities:
            raise ConfigurationError(f"no fragility set for class {cls!r}")
        if cls not in restorations:
            raise ConfigurationError(f"no restoration table for class {cls!r}")
    u = np.random.default_rng(seed).random(field.pga.size)
    classes = np.asarray(component_classes)
    states = np.zeros(field.pga.size, dtype=np.int64)
    durations = np.zeros(field.pga.size, dtype=np.float64)
    for cls in sorted(set(component_classes)):
        idx = np.flatnonzero(classes == cls)
        states[idx] = sample_damage_states(field.pga[idx], fragilities[cls], u[idx])
        durations[idx] = restorations[cls].days[states[idx]]
    return DamageScenario(scenario_id, tuple(component_ids), states, durations, field)
