"""Compare the numba-compiled kernels against the pure-Python fallback.

Each path runs in its own interpreter because the switch is read at import
time from EPNRECOVERY_JIT. Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scenarios 3]

Reported times are the best of ``--repeat`` runs, after one warm-up call
(which absorbs JIT compilation on the compiled path).
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from epnrecovery import _jit
from epnrecovery.config import load_config, sample_damage
from epnrecovery.policies import RandomBase, Rollout, SmartBase, rollout_action
from epnrecovery.recovery import simulate_policy

repeat, n_scen = int(sys.argv[1]), int(sys.argv[2])
cfg = load_config("gilroy")
problems = [cfg.problem(sample_damage(cfg, 0, i)) for i in range(n_scen)]


def best(fn):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def served_sweep():
    rng = np.random.default_rng(0)
    acc = 0.0
    for p in problems:
        for _ in range(500):
            rem = np.where(rng.random(p.durations.size) < 0.5, p.durations, 0.0)
            acc += p.served(rem)
    return acc


def smart_runs():
    return [simulate_policy(p, SmartBase()).makespan for p in problems]


def rollout_step():
    s = problems[0].initial_state()
    action, _ = rollout_action(s, RandomBase(), 1, 10, np.random.default_rng(1))
    return action.assigned


def rollout_run():
    return [simulate_policy(p, Rollout(RandomBase(), 1, 5, seed=3)).makespan for p in problems[:1]]


res = {"jit": _jit.JIT_ENABLED}
for name, fn in [("served x500/scenario", served_sweep), ("smart trajectory", smart_runs),
                 ("rollout decision Q=10", rollout_step), ("rollout trajectory Q=5", rollout_run)]:
    t, out = best(fn)
    res[name] = {"seconds": t, "result": repr(out)}
json.dump(res, sys.stdout)
"""


def run(flag: str, repeat: int, scenarios: int) -> dict:
    env = dict(os.environ, EPNRECOVERY_JIT=flag)
    done = subprocess.run([sys.executable, "-c", WORKER, str(repeat), str(scenarios)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(done.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scenarios", type=int, default=3)
    args = ap.parse_args()

    jit = run("1", args.repeat, args.scenarios)
    pure = run("0", args.repeat, args.scenarios)
    if not jit.pop("jit") or pure.pop("jit"):
        sys.exit("could not select both kernel paths (is numba installed?)")
    print(f"{'benchmark':<26}{'numba s':>12}{'python s':>12}{'speedup':>10}  same result")
    for name in jit:
        a, b = jit[name], pure[name]
        same = a["result"] == b["result"]
        print(f"{name:<26}{a['seconds']:>12.4f}{b['seconds']:>12.4f}"
              f"{b['seconds'] / a['seconds']:>9.1f}x  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
