"""Reference policies on one domain: uniform random, each constant action, and
(epidemic only) a few scripted vaccinate/quarantine schedules.

    python3 scripts/baselines.py rps --steps 100000
    python3 scripts/baselines.py epidemic --episodes 15 --env-param graph_kind=ba --env-param lam=1
"""
import argparse

import numpy as np
import yaml

from phiaixi.agent import ConstantPolicy, RandomPolicy, run
from phiaixi.envs import make_env


class Scripted:
    """Plays ``schedule(k)`` where k counts steps since the episode began."""

    def __init__(self, schedule):
        self.schedule = schedule
        self.k = 0

    def start(self, observation=None):
        self.k = 0
        return self.schedule(0)

    def step(self, percept):
        self.k = 0 if percept.done else self.k + 1
        return self.schedule(self.k)


EPIDEMIC_SCRIPTS = {
    "vaccinate_all_twice": lambda k: (k % 5) + 1 if k < 10 else 0,
    "quarantine_20_early": lambda k: 6 if k < 15 else 0,
    "quarantine_60_early": lambda k: 8 if k < 15 else 0,
}


def parse_params(items):
    out = {}
    for item in items:
        key, _, value = item.partition("=")
        out[key] = yaml.safe_load(value)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("env")
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--episodes", type=int, help="report the mean of the final N episode returns instead")
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--env-param", action="append", default=[], help="key=value passed to the environment")
    args = ap.parse_args()
    params = parse_params(args.env_param)
    probe = make_env(args.env, seed=0, **dict(params))
    policies = {"random": lambda s: RandomPolicy(probe.num_actions, s)}
    names = probe.action_names or [str(a) for a in range(probe.num_actions)]
    for a in range(probe.num_actions):
        policies[f"always_{names[a]}"] = lambda s, a=a: ConstantPolicy(a)
    if args.env == "epidemic":
        for name, fn in EPIDEMIC_SCRIPTS.items():
            policies[name] = lambda s, fn=fn: Scripted(fn)
    for name, make in policies.items():
        scores, term = [], []
        for seed in range(args.seeds):
            env = make_env(args.env, seed=seed, **dict(params))
            log = run(make(seed), env, args.steps)
            if args.episodes:
                eps = log.episodes[-args.episodes:]
                scores.append(np.mean([e["return"] for e in eps]) if eps else np.nan)
                term.append(np.mean([e["terminated"] for e in eps]) if eps else np.nan)
            else:
                scores.append(log.rewards[-args.steps // 5:].mean())
        extra = f"  termination {np.mean(term):.2f}" if term else ""
        print(f"{name:24s} {np.mean(scores):12.4f} +- {np.std(scores):.4f}{extra}")


if __name__ == "__main__":
    main()
