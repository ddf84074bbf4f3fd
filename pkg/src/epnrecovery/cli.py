"""Command-line entry point: sample, simulate, compare, oracle, validate."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import check_config, load_config, sample_damage, validate_config
from .epn import energized_load_points
from .errors import (
    CombinatorialBudgetError,
    ConfigurationError,
    ExperimentError,
    OracleUnavailableError,
    RecoveryError,
)
from .harness import ExperimentSpec, emit_outputs, policy_seed, run_experiment
from .policies import Rollout, exact_dp, parse_policy
from .recovery import Trajectory, objective1, objective2, simulate_policy

EXIT_PROBLEMS = 1
EXIT_ERROR = 2
EXIT_ORACLE = 3


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _load(args):
    cfg = load_config(args.config)
    check_config(cfg)
    return cfg


def _problem(cfg, args):
    scenario = sample_damage(cfg, args.seed, args.scenario)
    return cfg.problem(scenario, mode=args.mode, gamma=args.gamma)


def _report(traj: Trajectory, gamma: float) -> str:
    f1 = objective1(traj, gamma)
    f2 = objective2(traj) if traj.makespan > 0 else traj.initial_served
    return f"F1={float(f1)!r} F2={float(f2)!r} makespan={traj.makespan!r} epochs={len(traj.epochs)}"


def trajectory_rows(traj: Trajectory):
    yield [0, _fmt(0.0), "", _fmt(0.0), _fmt(traj.initial_served)]
    for t, ep in enumerate(traj.epochs, start=1):
        yield [t, _fmt(ep.clock), "+".join(ep.completed), _fmt(ep.k), _fmt(ep.served)]


class _Logged:
    """Rollout wrapper that records the per-epoch candidate estimates."""

    def __init__(self, policy: Rollout):
        self.policy = policy
        self.log: list = []

    def start(self, problem):
        return self.policy.start(problem, log=self.log)


def cmd_sample(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    sites = cfg.sites
    dmg_rows, im_rows = [], []
    for i in range(args.scenarios):
        sc = sample_damage(cfg, args.seed, i)
        for j, cid in enumerate(sc.component_ids):
            dmg_rows.append([i, cid, int(sc.states[j]), _fmt(sc.durations[j])])
            im_rows.append([i, cid, _fmt(sites[j, 0]), _fmt(sites[j, 1]), _fmt(sc.field.pga[j])])
    _write_csv(out / "scenarios.csv", ["scenario_id", "component_id", "state", "duration_days"], dmg_rows)
    _write_csv(out / "im_field.csv", ["scenario_id", "component_id", "site_x", "site_y", "pga_g"], im_rows)
    print(f"wrote {args.scenarios} scenarios to {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    problem = _problem(cfg, args)
    if len(args.policy) > 1:
        raise ConfigurationError("simulate runs exactly one policy")
    spec = args.policy[0] if args.policy else "random"
    policy = parse_policy(spec, args.objective).reseeded(policy_seed(args.seed, args.scenario))
    runner = _Logged(policy) if isinstance(policy, Rollout) else policy
    traj = simulate_policy(problem, runner)
    out = Path(args.out)
    _write_csv(out / "trajectory.csv",
               ["epoch", "clock_days", "completed_component_ids", "k_t_days", "h_t_persons"],
               trajectory_rows(traj))
    if isinstance(runner, _Logged):
        rows = ([t, str(e.action), _fmt(e.value), _fmt(e.sample_std)]
                for t, ests in enumerate(runner.log, start=1) for e in ests)
        _write_csv(out / "estimates.csv", ["epoch", "candidate_action", "mean", "std"], rows)
    if args.energized:
        remaining = problem.durations.copy()
        ids = problem.network.component_ids
        rows = []
        for t, ep in enumerate([None] + traj.epochs):
            if ep is not None:
                for cid in ep.completed:
                    remaining[ids.index(cid)] = 0.0
            lit = energized_load_points(problem.network, remaining == 0.0)
            rows += [[t, lp] for lp in sorted(lit)]
        _write_csv(out / "energized.csv", ["epoch", "load_point"], rows)
    print(f"{policy.name} scenario={args.scenario} damaged={traj.n_damaged} {_report(traj, problem.gamma)}")
    return 0


def cmd_compare(args) -> int:
    cfg = _load(args)
    spec = ExperimentSpec(
        config=str(args.config),
        policies=args.policy or ["random", "rollout:base=random,Q=30"],
        scenarios=args.scenarios,
        base_seed=args.seed,
        gamma=args.gamma if args.gamma is not None else cfg.defaults.get("gamma", 0.8),
        mode=args.mode or cfg.defaults.get("mode", "combined"),
        objective=args.objective,
        out_dir=str(args.out),
        workers=args.workers,
    )
    result = run_experiment(spec, cfg)
    emit_outputs(result, args.out)
    s = result.summary
    for p in result.policies:
        print(f"{p}: mean_F1={s.mean_f1[p]!r} std_F1={s.std_f1[p]!r} "
              f"mean_F2={s.mean_f2[p]!r} std_F2={s.std_f2[p]!r}")
    return 0


def cmd_oracle(args) -> int:
    cfg = _load(args)
    problem = _problem(cfg, args)
    value, plan = exact_dp(problem, args.objective, budget=args.budget)
    print(f"exact objective {args.objective} = {float(value)!r} over {len(plan)} epochs")
    for t, action in enumerate(plan, start=1):
        print(f"  {t}: {action}")
    if args.out:
        _write_csv(Path(args.out) / "oracle_plan.csv", ["epoch", "action"],
                   ([t, str(a)] for t, a in enumerate(plan, start=1)))
    return 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    problems = validate_config(cfg)
    for p in problems:
        print(f"problem: {p}")
    if problems:
        return EXIT_PROBLEMS
    n_dmg = sum(c.damageable for c in cfg.network.components)
    print(f"{cfg.name}: ok ({len(cfg.community.cells)} cells, {len(cfg.community.retailers)} retailers, "
          f"{n_dmg} damageable components, N={cfg.n_units})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="gilroy",
                        help="YAML scenario file or bundled name (gilroy, toy)")
    common.add_argument("--seed", type=int, default=0, help="base seed; scenario i uses seed + i")
    common.add_argument("--scenarios", type=int, default=100)
    common.add_argument("--scenario", type=int, default=0, help="scenario index for simulate/oracle")
    common.add_argument("--gamma", type=float, default=None)
    common.add_argument("--policy", action="append", default=[],
                        help="random | smart | rollout:base=random,Q=30 | exact (repeatable)")
    common.add_argument("--objective", type=int, choices=(1, 2), default=1)
    common.add_argument("--mode", choices=("households", "combined"), default=None)
    common.add_argument("--out", default="out")
    common.add_argument("--workers", type=int, default=1)

    ap = argparse.ArgumentParser(prog="epnrecovery", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common], help="emit damage scenarios and intensity fields")
    p = sub.add_parser("simulate", parents=[common], help="one policy on one scenario")
    p.add_argument("--energized", action="store_true", help="also dump energized load points per epoch")
    sub.add_parser("compare", parents=[common], help="paired Monte Carlo policy comparison")
    p = sub.add_parser("oracle", parents=[common], help="exact DP on a small instance")
    p.add_argument("--budget", type=int, default=200_000, help="state budget for the exact DP")
    sub.add_parser("validate", parents=[common], help="schema and semantic config checks")
    return ap


COMMANDS = {
    "sample": cmd_sample,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (OracleUnavailableError, CombinatorialBudgetError) as exc:
        print(f"oracle unavailable: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except RecoveryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
