"""Scenario configuration: YAML file, JSON-schema validation, model assembly."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
import yaml

from .community import (
    CommunityModel,
    GravityModel,
    GridCell,
    Retailer,
    travel_times_from_distance,
)
from .epn import Component, PowerNetwork, energized_nodes
from .errors import ConfigurationError, ModelConsistencyError, RecoveryError
from .fragility import DamageScenario, FragilitySet, RestorationTable, exceedance_matrix, sample_scenario
from .hazard import AttenuationModel, EventSpec, IMField, sample_im_field
from .recovery import RecoveryProblem

BUNDLED = {"gilroy": "gilroy_like.yaml", "toy": "toy.yaml"}


def _data_path(name: str) -> Path:
    return Path(str(resources.files("epnrecovery") / "data" / name))


def bundled_config_path(name: str = "gilroy") -> Path:
    return _data_path(BUNDLED.get(name, name))


def load_schema() -> dict:
    return json.loads(_data_path("config.schema.json").read_text())


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    network: PowerNetwork
    community: CommunityModel
    event: EventSpec
    attenuation: AttenuationModel
    fragilities: dict[str, FragilitySet]
    restorations: dict[str, RestorationTable]
    n_units: int
    defaults: dict[str, Any] = field(default_factory=dict)
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def sites(self) -> np.ndarray:
        return np.array([c.site for c in self.network.components], dtype=np.float64)

    def problem(self, scenario: DamageScenario, mode: str | None = None, gamma: float | None = None,
                n_units: int | None = None) -> RecoveryProblem:
        return RecoveryProblem(
            self.network,
            self.community,
            scenario,
            n_units or self.n_units,
            mode or self.defaults.get("mode", "combined"),
            gamma if gamma is not None else self.defaults.get("gamma", 0.8),
        )


def scenario_seeds(base_seed: int, index: int) -> tuple[np.random.SeedSequence, ...]:
    """``(intensity, damage, policy)`` seed sequences for scenario ``index``."""
    return tuple(np.random.SeedSequence(base_seed + index).spawn(3))


def sample_field(cfg: ScenarioConfig, seed) -> IMField:
    return sample_im_field(cfg.event, cfg.sites, cfg.attenuation, seed)


def sample_damage(cfg: ScenarioConfig, base_seed: int, index: int) -> DamageScenario:
    """Intensity field and damage for scenario ``index`` (seeded ``base_seed + index``).

    Non-damageable components are forced to DS0.
    """
    im_seed, dmg_seed, _ = scenario_seeds(base_seed, index)
    comps = cfg.network.components
    fld = sample_field(cfg, im_seed)
    sc = sample_scenario(
        fld,
        [c.id for c in comps],
        [c.component_class for c in comps],
        cfg.fragilities,
        cfg.restorations,
        dmg_seed,
        scenario_id=index,
    )
    keep = np.array([c.damageable for c in comps])
    return DamageScenario(index, sc.component_ids, np.where(keep, sc.states, 0),
                          np.where(keep, sc.durations, 0.0), fld)


def _xy(v) -> tuple[float, float]:
    return (float(v[0]), float(v[1]))


def parse_config(raw: dict) -> ScenarioConfig:
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigurationError(f"config invalid at {where}: {exc.message}") from None
    try:
        return _build(raw)
    except ConfigurationError:
        raise
    except (RecoveryError, KeyError, ValueError) as exc:
        raise ConfigurationError(f"config inconsistent: {exc}") from exc


def _build(raw: dict) -> ScenarioConfig:
    net_raw = raw["network"]
    node_xy = {n["id"]: _xy(n["xy"]) for n in net_raw["nodes"]}
    comps = []
    for c in net_raw["components"]:
        if "node" in c:
            guards = ("node", c["node"])
            default_site = node_xy[c["node"]]
        else:
            u, v = c["edge"]
            guards = ("edge", (u, v))
            default_site = tuple((np.array(node_xy[u]) + np.array(node_xy[v])) / 2)
        comps.append(Component(c["id"], c["class"], guards, _xy(c.get("site", default_site)),
                               bool(c.get("damageable", True))))

    com_raw = raw["community"]
    cells = [GridCell(c["id"], _xy(c["centroid"]), int(c["population"])) for c in com_raw["cells"]]
    retailers = [Retailer(r["id"], _xy(r["location"]), float(r["capacity"]), r["load_point"])
                 for r in com_raw["retailers"]]
    grav = com_raw["gravity"]
    if "travel_time" in grav:
        tt = np.array(grav["travel_time"], dtype=np.float64)
    elif "speed_km_per_min" in grav:
        tt = travel_times_from_distance(cells, retailers, grav["speed_km_per_min"])
    else:
        raise ConfigurationError("gravity needs travel_time or speed_km_per_min")
    cell_lp = {c["id"]: c["load_point"] for c in com_raw["cells"]}
    community = CommunityModel(tuple(cells), tuple(retailers), GravityModel(float(grav["b"]), tt), cell_lp)

    load_points = {lp: "cell" for lp in cell_lp.values()}
    load_points.update({r.epn_load_point: "retailer" for r in retailers})
    network = PowerNetwork(
        tuple(node_xy),
        tuple(tuple(e) for e in net_raw["edges"]),
        tuple(net_raw["sources"]),
        tuple(comps),
        load_points,
    )

    fragilities, restorations = {}, {}
    for cls, spec in raw["fragility"].items():
        fragilities[cls] = FragilitySet(cls, spec["medians"], spec["betas"])
        restorations[cls] = RestorationTable(cls, spec["restoration_days"])
    missing = sorted({c.component_class for c in comps} - set(fragilities))
    if missing:
        raise ConfigurationError(f"no fragility entry for component classes {missing}")

    ev = raw["hazard"]["event"]
    at = raw["hazard"]["attenuation"]
    return ScenarioConfig(
        name=raw["name"],
        network=network,
        community=community,
        event=EventSpec(float(ev["magnitude"]), _xy(ev["epicenter"]), float(ev.get("depth_km", 0.0))),
        attenuation=AttenuationModel(
            float(at["beta0"]), float(at["beta1"]), float(at["beta2"]), float(at["c_near"]),
            float(at.get("sigma_inter", 0.0)), float(at.get("sigma_intra", 0.0)),
        ),
        fragilities=fragilities,
        restorations=restorations,
        n_units=int(raw["resources"]["n_units"]),
        defaults=dict(raw.get("defaults", {})),
        raw=raw,
    )


def load_config(path: str | Path | None = None) -> ScenarioConfig:
    """Load a YAML scenario file; ``None`` or a bundled name selects a bundled one."""
    if path is None:
        path = bundled_config_path()
    elif str(path) in BUNDLED:
        path = bundled_config_path(str(path))
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config {path} must be a mapping")
    return parse_config(raw)


def validate_config(cfg: ScenarioConfig, pga_grid=None) -> list[str]:
    """Semantic checks beyond the schema. Returns a list of problems (empty = ok)."""
    problems = []
    every = {c.id: True for c in cfg.network.components}
    lit = energized_nodes(cfg.network, every)
    dark = sorted(set(cfg.network.load_points) - lit)
    if dark:
        problems.append(f"load points unreachable with every component functional: {dark}")
    if pga_grid is None:
        pga_grid = np.geomspace(1e-3, 5.0, 400)
    for cls, fset in cfg.fragilities.items():
        ex = exceedance_matrix(pga_grid, fset)
        if np.any(np.diff(ex, axis=1) > 0):
            bad = pga_grid[np.any(np.diff(ex, axis=1) > 0, axis=1)]
            problems.append(
                f"fragility curves for {cls} cross between {bad.min():.3g} g and {bad.max():.3g} g"
            )
    if cfg.community.total_population <= 0:
        problems.append("total population is zero")
    return problems


def check_config(cfg: ScenarioConfig) -> None:
    problems = validate_config(cfg)
    if problems:
        raise ModelConsistencyError("; ".join(problems))
