"""Seeded experiment runs with resumable checkpoints and CSV artifacts."""
from __future__ import annotations

import copy
import csv
import pickle
from dataclasses import replace
from pathlib import Path

import numpy as np

from .agent import Agent, moving_average
from .config import ExperimentConfig, dump_config
from .envs import make_env
from .predicates import write_manifest

ARTIFACTS = ("learning_curve.csv", "actions.csv", "episodes.csv", "features.csv", "checkpoint.pkl")


class Runner:
    """Agent-environment loop whose whole state pickles, so a run can resume mid-way."""

    def __init__(self, cfg: ExperimentConfig, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.env = make_env(cfg.env, seed=seed, **copy.deepcopy(cfg.env_params))
        self.agent = Agent(self.env, replace(cfg.agent, seed=seed))
        self.steps = cfg.steps
        self.t = 0
        self.rewards = np.zeros(cfg.steps)
        self.actions = np.zeros(cfg.steps, dtype=np.int64)
        self.episodes: list[dict] = []
        self._ep_return = 0.0
        self._ep_len = 0
        self._action = None

    @property
    def done(self) -> bool:
        return self.t >= self.steps

    def advance(self, until: int | None = None) -> None:
        until = self.steps if until is None else min(until, self.steps)
        env, agent = self.env, self.agent
        if self._action is None:
            env.reset()
            self._action = agent.start()
        while self.t < until:
            a = self._action
            p = env.step(a)
            t = self.t
            self.rewards[t], self.actions[t] = p.reward, a
            self._ep_return += p.reward
            self._ep_len += 1
            if p.done:
                self.episodes.append({
                    "episode": len(self.episodes), "end_step": t + 1, "length": self._ep_len,
                    "return": p.info.get("episode_return", self._ep_return),
                    "terminated": bool(p.info.get("terminated", p.info.get("success", True))),
                })
                self._ep_return, self._ep_len = 0.0, 0
            self._action = agent.step(p)
            self.t = t + 1

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh)

    @classmethod
    def load(cls, path) -> "Runner":
        with open(path, "rb") as fh:
            runner = pickle.load(fh)
        runner.agent.reattach(runner.env)
        return runner


# ---------------------------------------------------------------------------
# artifacts


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_learning_curve(path, rewards, window: int, stride: int) -> None:
    w = min(window, len(rewards))
    ma = moving_average(rewards, w) if w else np.zeros(0)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "window", "reward_ma"])
        for i in range(0, len(ma), stride):
            out.writerow([i + w, w, _fmt(ma[i])])
        if len(ma) and (len(ma) - 1) % stride:
            out.writerow([len(ma) - 1 + w, w, _fmt(ma[-1])])


def write_action_curves(path, actions, names, window: int, stride: int) -> None:
    w = min(window, len(actions))
    curves = [moving_average(actions == a, w) for a in range(len(names))] if w else []
    n = len(curves[0]) if curves else 0
    rows = list(range(0, n, stride))
    if n and rows[-1] != n - 1:
        rows.append(n - 1)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "window"] + list(names))
        for i in rows:
            out.writerow([i + w, w] + [_fmt(c[i]) for c in curves])


def write_episodes(path, episodes) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["episode", "end_step", "length", "return", "terminated"])
        for e in episodes:
            out.writerow([e["episode"], e["end_step"], e["length"], _fmt(e["return"]), int(e["terminated"])])


def write_features(path, agent: Agent) -> None:
    if agent.report is None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerow(["predicate_id", "votes", "selections", "retention", "kept", "reward"])
        return
    agent.report.write_csv(path, [p.id for p in agent.pool])


def action_names(env) -> list[str]:
    names = list(getattr(env, "action_names", ()) or ())
    return names if len(names) == env.num_actions else [f"action_{a}" for a in range(env.num_actions)]


def write_artifacts(runner: Runner, seed_dir: Path) -> None:
    cfg = runner.cfg
    seed_dir.mkdir(parents=True, exist_ok=True)
    n = runner.t
    write_learning_curve(seed_dir / "learning_curve.csv", runner.rewards[:n], cfg.windows.reward, cfg.windows.stride)
    write_action_curves(seed_dir / "actions.csv", runner.actions[:n], action_names(runner.env),
                        cfg.windows.actions, cfg.windows.stride)
    write_episodes(seed_dir / "episodes.csv", runner.episodes)
    write_features(seed_dir / "features.csv", runner.agent)
    runner.save(seed_dir / "checkpoint.pkl")
    from .plotting import plot_actions, plot_learning_curve

    plots = seed_dir / "plots"
    plots.mkdir(exist_ok=True)
    plot_learning_curve(seed_dir / "learning_curve.csv", plots / "learning_curve.svg")
    plot_actions(seed_dir / "actions.csv", plots / "actions.svg")


def run_experiment(cfg: ExperimentConfig, resume: bool = False, log=print) -> list[Path]:
    """Runs every seed; returns the per-seed directories."""
    root = cfg.resolved_output()
    root.mkdir(parents=True, exist_ok=True)
    (root / "config.yaml").write_text(dump_config(cfg))
    dirs = []
    for seed in cfg.seeds:
        seed_dir = root / f"seed_{seed}"
        ckpt = seed_dir / "checkpoint.pkl"
        runner = Runner.load(ckpt) if resume and ckpt.exists() else Runner(cfg, seed)
        if seed == cfg.seeds[0]:
            write_manifest(runner.agent.pool, root / "pool_manifest.tsv")
        if runner.done and resume:
            log(f"seed {seed}: already complete")
            dirs.append(seed_dir)
            continue
        try:
            runner.advance()
        except KeyboardInterrupt:
            seed_dir.mkdir(parents=True, exist_ok=True)
            runner.save(ckpt)
            log(f"interrupted at step {runner.t}; resume with --resume")
            raise
        write_artifacts(runner, seed_dir)
        log(f"seed {seed}: mean reward {runner.rewards.mean():.4f}, selected {runner.agent.selected}")
        dirs.append(seed_dir)
    return dirs
