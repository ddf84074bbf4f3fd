"""Gridded community, food retailers and the gravity shopping model."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelDefinitionError, NumericRangeError


@dataclass(frozen=True)
class GridCell:
    id: str
    centroid: tuple[float, float]
    population: int

    def __post_init__(self):
        if int(self.population) != self.population or self.population < 0:
            raise ModelDefinitionError(
                f"cell {self.id}: population must be a nonnegative integer, got {self.population}"
            )


@dataclass(frozen=True)
class Retailer:
    id: str
    location: tuple[float, float]
    capacity: float
    epn_load_point: str

    def __post_init__(self):
        if not self.capacity > 0:
            raise ModelDefinitionError(f"retailer {self.id}: capacity must be > 0")


@dataclass(frozen=True, eq=False)
class GravityModel:
    """``P(r | c)`` proportional to ``w_r * exp(b * T_cr)``.

    ``travel_time`` is indexed ``[cell, retailer]`` in the order the owning
    :class:`CommunityModel` lists them.
    """

    b: float
    travel_time: np.ndarray

    def __post_init__(self):
        tt = np.array(self.travel_time, dtype=np.float64)
        if tt.ndim != 2:
            raise ModelDefinitionError("travel_time must be a 2-d matrix")
        if not self.b < 0:
            raise ModelDefinitionError(f"gravity exponent b must be negative, got {self.b}")
        if np.any(tt < 0) or np.any(np.isnan(tt)):
            raise ModelDefinitionError("travel times must be nonnegative")
        tt.setflags(write=False)
        object.__setattr__(self, "travel_time", tt)


def travel_times_from_distance(
    cells: Sequence[GridCell], retailers: Sequence[Retailer], speed_km_per_min: float
) -> np.ndarray:
    """Euclidean centroid-to-store distance divided by a constant speed (minutes)."""
    if not speed_km_per_min > 0:
        raise ModelDefinitionError("speed must be positive")
    c = np.array([cell.centroid for cell in cells], dtype=np.float64).reshape(-1, 2)
    r = np.array([ret.location for ret in retailers], dtype=np.float64).reshape(-1, 2)
    dist = np.sqrt(((c[:, None, :] - r[None, :, :]) ** 2).sum(axis=-1))
    return dist / speed_km_per_min


@dataclass(frozen=True, eq=False)
class CommunityModel:
    cells: tuple[GridCell, ...]
    retailers: tuple[Retailer, ...]
    gravity: GravityModel
    cell_load_points: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "retailers", tuple(self.retailers))
        object.__setattr__(self, "cell_load_points", dict(self.cell_load_points))
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise ModelDefinitionError("cell ids must be unique")
        rids = [r.id for r in self.retailers]
        if len(set(rids)) != len(rids):
            raise ModelDefinitionError("retailer ids must be unique")
        if self.total_population <= 0:
            raise ModelDefinitionError("total population must be positive")
        shape = self.gravity.travel_time.shape
        if shape != (len(self.cells), len(self.retailers)):
            raise ModelDefinitionError(
                f"travel_time shape {shape} does not match "
                f"{len(self.cells)} cells x {len(self.retailers)} retailers"
            )
        missing = [cid for cid in ids if cid not in self.cell_load_points]
        if missing:
            raise ModelDefinitionError(f"cells without a load point: {missing}")

    @property
    def total_population(self) -> int:
        return int(sum(c.population for c in self.cells))

    @property
    def populations(self) -> np.ndarray:
        return np.array([c.population for c in self.cells], dtype=np.float64)

    @property
    def capacities(self) -> np.ndarray:
        return np.array([r.capacity for r in self.retailers], dtype=np.float64)

    def cell_index(self, cell_id: str) -> int:
        for i, c in enumerate(self.cells):
            if c.id == cell_id:
                return i
        raise KeyError(cell_id)

    def with_capacities(self, capacities: Sequence[float]) -> "CommunityModel":
        """Copy with retailer capacities replaced (used by invariance checks)."""
        retailers = tuple(
            Retailer(r.id, r.location, float(w), r.epn_load_point)
            for r, w in zip(self.retailers, capacities)
        )
        return CommunityModel(self.cells, retailers, self.gravity, self.cell_load_points)


def _normalized_weights(log_w: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(exponent)):
        raise NumericRangeError("non-finite b*T_cr; travel times or b out of range")
    z = log_w + exponent
    z = z - z.max(axis=-1, keepdims=True)
    w = np.exp(z)
    total = w.sum(axis=-1, keepdims=True)
    if not np.all(np.isfinite(total)) or np.any(total <= 0):
        raise NumericRangeError("gravity normalizer is not finite and positive")
    return w / total


def retailer_assignment_probs(cell: GridCell | int, community: CommunityModel) -> np.ndarray:
    """Probability that residents of ``cell`` shop at each retailer.

    ``cell`` may be a :class:`GridCell` of the community or its row index.
    """
    if not community.retailers:
        raise ModelDefinitionError("community has no retailers")
    row = cell if isinstance(cell, (int, np.integer)) else community.cell_index(cell.id)
    exponent = community.gravity.b * community.gravity.travel_time[row]
    return _normalized_weights(np.log(community.capacities), exponent)


def expected_assignment_matrix(community: CommunityModel) -> np.ndarray:
    """Cells x retailers matrix of assignment probabilities (rows sum to 1)."""
    if not community.retailers:
        raise ModelDefinitionError("community has no retailers")
    exponent = community.gravity.b * community.gravity.travel_time
    return _normalized_weights(np.log(community.capacities)[None, :], exponent)
