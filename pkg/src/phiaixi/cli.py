"""Command-line entry point: run, costdemo, featsel-report, plot, bdd-export."""
from __future__ import annotations

import argparse
import sys
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .core import ConfigError
from .config import OUTPUT_ENV_VAR, dump_config, load_config

PAPER_LIMITS = {"phi0": (0.517, 0.047), "phi1": (0.0808, 0.0808)}


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if args.steps is not None:
        cfg.steps = args.steps
    if args.out is not None:
        cfg.output_dir = args.out
    cfg.output_dir = str(cfg.resolved_output())
    cfg.validate()
    if args.dry_run:
        print(dump_config(cfg), end="")
        return 0
    from .experiment import run_experiment

    try:
        run_experiment(cfg, resume=args.resume)
    except KeyboardInterrupt:
        return 130
    return 0


def cmd_costdemo(args) -> int:
    from .cost import switching_demo, write_cost_curve

    n = args.steps
    if n < 1:
        raise ConfigError("steps must be at least 1")
    if n < 1000:
        print(f"warning: n = {n} is a small sample; values are far from their limits", file=sys.stderr)
    costs = switching_demo(n, args.seed)
    print(f"{'mapping':8s} {'Cost_M/n':>10s} {'Cost_M0/n':>10s} {'limit_M':>8s} {'limit_M0':>8s}")
    for name, cb in costs.items():
        m, m0 = cb.per_step()
        lim_m, lim_m0 = PAPER_LIMITS[name]
        print(f"{name:8s} {m:10.4f} {m0:10.4f} {lim_m:8.4f} {lim_m0:8.4f}")
    best_m = min(costs, key=lambda k: costs[k].per_step()[0])
    best_m0 = min(costs, key=lambda k: costs[k].per_step()[1])
    print(f"Cost_M prefers {best_m}; Cost_M0 prefers {best_m0}")
    if args.out:
        grid = sorted({int(x) for x in np.unique(np.geomspace(10, n, num=20).astype(int))} | {n})
        rows = []
        for k in grid:
            c = switching_demo(k, args.seed)
            rows.append((k, c["phi0"].per_step()[0], c["phi0"].per_step()[1]))
        write_cost_curve(args.out, rows)
    return 0


def _load_runner(path):
    from .experiment import Runner

    path = Path(path)
    if path.is_dir():
        path = path / "checkpoint.pkl"
    if not path.exists():
        raise ConfigError(f"no checkpoint at {path}")
    return Runner.load(path)


def report_table(pool, report, in_phi=()) -> list[OrderedDict]:
    """Per predicate kind: generated, kept by RF-BDD, kept in phi, mean retention of kept."""
    table: OrderedDict = OrderedDict()
    kept = set(report.selected) if report is not None else set()
    best = {j: row for j, *row in report.best_rows()} if report is not None else {}
    for p in pool:
        key = (p.family, p.kind)
        row = table.setdefault(key, OrderedDict(family=p.family, kind=p.kind, generated=0, kept=0, in_phi=0,
                                                retention=[]))
        row["generated"] += 1
        if p.id in kept:
            row["kept"] += 1
            row["retention"].append(best[p.id][2])
        if p.id in in_phi:
            row["in_phi"] += 1
    out = []
    for row in table.values():
        ret = row.pop("retention")
        row["mean_retention"] = float(np.mean(ret)) if ret else 0.0
        out.append(row)
    return out


def planted_fixture(seed: int = 0, n: int = 10_000, pool: int = 100):
    """Pool of random bits where reward = majority of predicates 0, 1, 2."""
    from .featsel import RfBddConfig, SelectionData, rf_bdd

    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, pool), dtype=np.uint8)
    rewards = (X[:, :3].sum(axis=1) >= 2).astype(np.int64)
    data = SelectionData(X, np.zeros(n, dtype=np.int64), rewards, 1)
    report = rf_bdd(data, RfBddConfig(num_subsets=500, subset_size=8, threshold=0.9), rng)
    return data, report


def cmd_featsel_report(args) -> int:
    if args.planted:
        from .predicates import Eq, Predicate, RandomBitFeature

        _, report = planted_fixture(args.seed)
        pool = [Predicate(j, "planted" if j < 3 else "noise", RandomBitFeature(0, j), Eq(1)) for j in range(100)]
        rows = report_table(pool, report, set(report.selected))
        kept = report.selected
        print("kept predicates:", ", ".join(f"{j} (retention {report.best_rows()[j][3]:.2f})" for j in kept))
    else:
        runner = _load_runner(args.checkpoint)
        agent = runner.agent
        if agent.report is None or not agent.report.rewards:
            print("warning: no reward statistics collected yet; table is empty", file=sys.stderr)
            rows = []
        else:
            rows = report_table(agent.pool, agent.report, set(agent.selected))
    print(f"{'type':>4s} {'kind':24s} {'generated':>9s} {'kept':>5s} {'in_phi':>6s} {'retention':>9s}")
    for row in rows:
        print(f"{row['family']:>4d} {row['kind']:24s} {row['generated']:9d} {row['kept']:5d} {row['in_phi']:6d} "
              f"{row['mean_retention']:9.3f}")
    if rows:
        print(f"{'':4s} {'total':24s} {sum(r['generated'] for r in rows):9d} {sum(r['kept'] for r in rows):5d} "
              f"{sum(r['in_phi'] for r in rows):6d}")
    return 0


def cmd_plot(args) -> int:
    from .plotting import plot_csv

    out = args.out or str(Path(args.csv).with_suffix(".svg"))
    plot_csv(args.csv, out)
    print(out)
    return 0


def cmd_bdd_export(args) -> int:
    from .bdd import Bdd

    if args.table:
        bits = args.table.strip()
        if set(bits) - {"0", "1"} or len(bits) & (len(bits) - 1):
            raise ConfigError("table must be a 0/1 string whose length is a power of two")
        bdd = Bdd.from_table(np.array([int(c) for c in bits], dtype=np.uint8)).reduce()
        names = args.names.split(",") if args.names else None
    else:
        from .agent import selection_data
        from .featsel import build_rule, choose_threshold, sharpness_floor

        runner = _load_runner(args.checkpoint)
        agent = runner.agent
        if agent.abstraction is None:
            raise ConfigError("checkpoint has no selected abstraction yet")
        X = agent.abstraction.series(agent.history)
        data = selection_data(np.asarray(X), agent.history, agent.reward_space, agent.num_actions)
        stats = data.stats_for(list(range(X.shape[1])))
        reward = args.reward if args.reward is not None else data.rewards.max()
        floor, _ = sharpness_floor(stats, reward)
        D = choose_threshold(floor, agent.config.rfbdd.d_multiplier)
        rule = build_rule(stats, reward, D, X.shape[1], agent.num_actions, agent.config.rfbdd.confidence_z)
        bdd = rule.bdd()
        names = [f"p{agent.selected[j]}" for j in range(X.shape[1])] + [f"a{i + 1}" for i in range(rule.action_bits)]
    dot = bdd.to_dot(names)
    if args.out:
        Path(args.out).write_text(dot)
    else:
        print(dot, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phiaixi", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a config for each seed")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV_VAR} or ./runs)")
    p.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")
    p.add_argument("--resume", action="store_true", help="continue from existing checkpoints")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("costdemo", help="Cost_M vs Cost_M0 on the switching environment")
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional CSV of per-step costs against n for the flip mapping")
    p.set_defaults(func=cmd_costdemo)

    p = sub.add_parser("featsel-report", help="per-type predicate selection table")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--checkpoint", help="checkpoint file or seed directory")
    g.add_argument("--planted", action="store_true", help="run the planted three-predicate fixture")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_featsel_report)

    p = sub.add_parser("plot", help="render a run CSV to SVG")
    p.add_argument("csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("bdd-export", help="write a reduced decision diagram as DOT")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", help="truth table as a 0/1 string, variable 1 most significant")
    g.add_argument("--checkpoint", help="checkpoint file or seed directory")
    p.add_argument("--reward", type=int, help="reward id for the decision rule (checkpoint mode)")
    p.add_argument("--names", help="comma-separated variable names (table mode)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bdd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
