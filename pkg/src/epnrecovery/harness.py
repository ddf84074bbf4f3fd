"""Monte Carlo policy comparison over paired hazard/damage scenarios."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ScenarioConfig, load_config, sample_damage, scenario_seeds
from .errors import ConfigurationError, DegenerateTrajectoryError, ExperimentError, RecoveryError
from .policies import Policy, parse_policy
from .recovery import Trajectory, objective1, objective2, simulate_policy


@dataclass
class ExperimentSpec:
    config: str = "gilroy"
    policies: Sequence[str] = ("random", "rollout:base=random,Q=30")
    scenarios: int = 100
    base_seed: int = 0
    gamma: float = 0.8
    mode: str = "combined"
    objective: int = 1
    out_dir: str | None = None
    workers: int = 1
    keep_raw: bool = False

    def __post_init__(self):
        self.policies = tuple(self.policies)
        if not self.policies:
            raise ConfigurationError("at least one policy is required")
        if self.scenarios < 1:
            raise ConfigurationError("scenario count must be >= 1")
        if not 0 < self.gamma <= 1:
            raise ConfigurationError("gamma must lie in (0, 1]")
        if self.mode not in ("households", "combined"):
            raise ConfigurationError("mode must be households or combined")
        if self.objective not in (1, 2):
            raise ConfigurationError("objective must be 1 or 2")


@dataclass
class ScenarioRecord:
    scenario_index: int
    seed: int
    policy: str
    n_damaged: int
    f1: float
    f2: float
    makespan: float
    initial_served: float
    clocks: np.ndarray
    served: np.ndarray


@dataclass
class RecoveryCurve:
    days: np.ndarray
    mean: dict[str, np.ndarray]
    std: dict[str, np.ndarray]
    raw: dict[str, np.ndarray] | None = None


@dataclass
class ComparisonSummary:
    mean_f1: dict[str, float]
    std_f1: dict[str, float]
    mean_f2: dict[str, float]
    std_f2: dict[str, float]
    cma_f1: dict[str, np.ndarray]


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    policies: list[str]
    population: int
    curve: RecoveryCurve
    summary: ComparisonSummary
    records: list[ScenarioRecord] = field(default_factory=list)
    config_digest: str = ""


def cumulative_moving_average(values) -> np.ndarray:
    """Running mean: ``out[i] = sum(values[:i+1]) / (i+1)``."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cumulative moving average of an empty sequence")
    return np.cumsum(v) / np.arange(1, v.size + 1)


def service_curve(clocks: np.ndarray, served: np.ndarray, initial: float, days: np.ndarray) -> np.ndarray:
    """Step function of served population sampled by last value at each day."""
    idx = np.searchsorted(clocks, days, side="right") - 1
    values = np.where(idx >= 0, served[np.clip(idx, 0, None)] if served.size else initial, initial)
    return values.astype(np.float64)


def _f2_or_initial(traj: Trajectory) -> float:
    try:
        return objective2(traj)
    except DegenerateTrajectoryError:
        # nothing to repair: service never dropped below its post-event level
        return traj.initial_served


def unique_names(names: Sequence[str]) -> list[str]:
    """Suffix repeated policy names with ``#2``, ``#3``, ... in listing order."""
    seen: dict[str, int] = {}
    out = []
    for n in names:
        seen[n] = seen.get(n, 0) + 1
        out.append(n if seen[n] == 1 else f"{n}#{seen[n]}")
    return out


def _resolve_config(config) -> ScenarioConfig:
    return config if isinstance(config, ScenarioConfig) else load_config(config)


def _policy_objects(spec: ExperimentSpec) -> list[Policy]:
    return [parse_policy(p, spec.objective) for p in spec.policies]


def policy_seed(base_seed: int, index: int) -> int:
    """Seed shared by every policy on scenario ``index`` (paired design)."""
    return int(scenario_seeds(base_seed, index)[2].generate_state(1, np.uint64)[0])


def _run_scenario(cfg: ScenarioConfig, spec: ExperimentSpec, index: int) -> list[ScenarioRecord]:
    seed = spec.base_seed + index
    try:
        scenario = sample_damage(cfg, spec.base_seed, index)
        problem = cfg.problem(scenario, mode=spec.mode, gamma=spec.gamma)
        seed_for_policy = policy_seed(spec.base_seed, index)
        out = []
        policies = _policy_objects(spec)
        for policy, name in zip(policies, unique_names([p.name for p in policies])):
            traj = simulate_policy(problem, policy.reseeded(seed_for_policy))
            out.append(ScenarioRecord(
                index, seed, name, len(scenario.damaged),
                float(objective1(traj, spec.gamma, problem.population)),
                float(_f2_or_initial(traj)),
                traj.makespan, traj.initial_served, traj.clocks, traj.served_series,
            ))
        return out
    except RecoveryError as exc:
        raise ExperimentError(f"{type(exc).__name__}: {exc}", index, seed) from exc


def _worker(args):
    cfg, spec, index = args
    return _run_scenario(cfg, spec, index)


def run_experiment(spec: ExperimentSpec, config: ScenarioConfig | None = None) -> ExperimentResult:
    """Simulate every policy on scenarios ``base_seed + i``, i < S, and aggregate.

    Every policy sees the same scenarios and the same per-scenario policy seed.
    Aggregation runs in scenario order, so ``workers`` never changes results.
    """
    cfg = config if config is not None else _resolve_config(spec.config)
    names = unique_names([p.name for p in _policy_objects(spec)])
    jobs = [(cfg, spec, i) for i in range(spec.scenarios)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            per_scenario = list(pool.map(_worker, jobs))
    else:
        per_scenario = [_worker(j) for j in jobs]
    records = [r for rs in per_scenario for r in rs]

    horizon = max((r.makespan for r in records), default=0.0)
    days = np.arange(0, int(math.ceil(horizon)) + 1, dtype=np.float64)
    mean, std, raw = {}, {}, {}
    mean_f1, std_f1, mean_f2, std_f2, cma = {}, {}, {}, {}, {}
    for k, name in enumerate(names):
        mine = [rs[k] for rs in per_scenario]
        curves = np.array([service_curve(r.clocks, r.served, r.initial_served, days) for r in mine])
        mean[name] = curves.mean(axis=0)
        std[name] = curves.std(axis=0)
        if spec.keep_raw:
            raw[name] = curves
        f1 = np.array([r.f1 for r in mine])
        f2 = np.array([r.f2 for r in mine])
        with np.errstate(invalid="ignore"):
            mean_f1[name], std_f1[name] = float(f1.mean()), float(f1.std())
        mean_f2[name], std_f2[name] = float(f2.mean()), float(f2.std())
        cma[name] = cumulative_moving_average(f1)
    return ExperimentResult(
        spec,
        names,
        cfg.community.total_population,
        RecoveryCurve(days, mean, std, raw if spec.keep_raw else None),
        ComparisonSummary(mean_f1, std_f1, mean_f2, std_f2, cma),
        records,
        config_digest(cfg),
    )


def config_digest(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(json.dumps(cfg.raw, sort_keys=True).encode()).hexdigest()


def _fmt(x) -> str:
    return repr(float(x))


def emit_outputs(result: ExperimentResult, directory) -> list[Path]:
    """Write curves, summary, cumulative averages, per-scenario results and a manifest."""
    if not result.policies:
        raise ConfigurationError("no policies to write")
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    def table(name, header, rows):
        path = out / name
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        paths.append(path)

    c = result.curve
    table("curves.csv", ["day", "policy", "mean_served", "std_served"],
          ([_fmt(d), p, _fmt(c.mean[p][i]), _fmt(c.std[p][i])]
           for p in result.policies for i, d in enumerate(c.days)))
    s = result.summary
    table("summary.csv", ["policy", "mean_F1", "std_F1", "mean_F2", "std_F2"],
          ([p, _fmt(s.mean_f1[p]), _fmt(s.std_f1[p]), _fmt(s.mean_f2[p]), _fmt(s.std_f2[p])]
           for p in result.policies))
    table("cma.csv", ["scenario_index", "policy", "cma_F1"],
          ([i + 1, p, _fmt(v)] for p in result.policies for i, v in enumerate(s.cma_f1[p])))
    table("scenarios.csv", ["scenario_index", "seed", "policy", "n_damaged", "F1", "F2", "makespan"],
          ([r.scenario_index, r.seed, r.policy, r.n_damaged, _fmt(r.f1), _fmt(r.f2), _fmt(r.makespan)]
           for r in result.records))

    spec = asdict(result.spec)
    spec["policies"] = list(spec["policies"])
    manifest = {
        "spec": spec,
        "policies": result.policies,
        "population": result.population,
        "config_sha256": result.config_digest,
        "scenario_seeds": [result.spec.base_seed + i for i in range(result.spec.scenarios)],
        "outputs": {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in paths},
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    paths.append(mpath)
    return paths


def read_curves(path) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Parse curves.csv back into ``{policy: (days, mean, std)}``."""
    rows: dict[str, list] = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            rows.setdefault(row["policy"], []).append(
                (float(row["day"]), float(row["mean_served"]), float(row["std_served"]))
            )
    return {p: tuple(np.array(col) for col in zip(*v)) for p, v in rows.items()}
