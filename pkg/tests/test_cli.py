import pickle

import yaml

from phiaixi.cli import main
from phiaixi.experiment import ARTIFACTS, Runner

TINY = {
    "schema_version": 1,
    "env": "epidemic",
    "env_params": {"lam": 10.0, "eta1": 2.0, "eta2": 4.0, "num_nodes": 30, "graph_kind": "ba"},
    "seeds": [0, 1],
    "steps": 120,
    "agent": {"collection_steps": 60, "rfbdd": {"num_subsets": 20},
              "planner": {"horizon": 1, "simulations": 4}},
    "windows": {"reward": 20, "actions": 10, "stride": 5},
}


def write_config(tmp_path, cfg=TINY, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_dry_run_writes_nothing(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--dry-run"]) == 0
    printed = yaml.safe_load(capsys.readouterr().out)
    assert printed["env"] == "epidemic" and printed["agent"]["collection_steps"] == 60
    assert printed["agent"]["planner"]["simulations"] == 4
    assert not out.exists()


def test_output_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PHIAIXI_OUT", str(tmp_path / "envroot"))
    assert main(["run", "--config", str(write_config(tmp_path)), "--dry-run"]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["output_dir"] == str(tmp_path / "envroot")


def test_run_artifacts_and_rerun_identical(tmp_path):
    cfg = write_config(tmp_path)
    for name in ("a", "b"):
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    for seed in (0, 1):
        d = tmp_path / "a" / f"seed_{seed}"
        assert sorted(p.name for p in d.iterdir() if p.is_file()) == sorted(ARTIFACTS)
        assert sorted(p.name for p in (d / "plots").iterdir()) == ["actions.svg", "learning_curve.svg"]
        for f in [p for p in ARTIFACTS if p.endswith(".csv")] + ["plots/learning_curve.svg"]:
            assert (d / f).read_bytes() == (tmp_path / "b" / f"seed_{seed}" / f).read_bytes(), f
    root = tmp_path / "a"
    assert (root / "config.yaml").exists()
    assert (root / "pool_manifest.tsv").read_text().count("\n") == 1 + 1489
    header = (root / "seed_0" / "learning_curve.csv").read_text().splitlines()[0]
    assert header == "t,window,reward_ma"


def test_resume_matches_uninterrupted(tmp_path):
    cfg = write_config(tmp_path, {**TINY, "seeds": [0]})
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "full")]) == 0
    # a half-finished checkpoint, as an interrupt would leave it
    from phiaixi.config import load_config

    c = load_config(cfg)
    c.output_dir = str(tmp_path / "part")
    runner = Runner(c, 0)
    runner.advance(70)
    (tmp_path / "part" / "seed_0").mkdir(parents=True)
    runner.save(tmp_path / "part" / "seed_0" / "checkpoint.pkl")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "part"), "--resume"]) == 0
    for f in ("learning_curve.csv", "actions.csv", "episodes.csv", "features.csv"):
        assert (tmp_path / "full" / "seed_0" / f).read_bytes() == (tmp_path / "part" / "seed_0" / f).read_bytes()


def test_invalid_config_exit_code(tmp_path, capsys):
    bad = write_config(tmp_path, {**TINY, "seeds": []}, "bad.yaml")
    assert main(["run", "--config", str(bad), "--dry-run"]) == 2
    assert "seeds" in capsys.readouterr().err
    typo = write_config(tmp_path, {**TINY, "agnet": {}}, "typo.yaml")
    assert main(["run", "--config", str(typo), "--dry-run"]) == 2
    missing = write_config(tmp_path, {**TINY, "env_params": {"graph_path": "/no/such/file"}}, "missing.yaml")
    assert main(["run", "--config", str(missing), "--dry-run"]) == 2


def test_costdemo_warns_on_small_n(capsys):
    assert main(["costdemo", "--steps", "10"]) == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err
    assert "phi0" in captured.out and "phi1" in captured.out


def test_costdemo_curve(tmp_path, capsys):
    out = tmp_path / "cost.csv"
    assert main(["costdemo", "--steps", "2000", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,cost_m_per_step,cost_m0_per_step"
    assert lines[-1].startswith("2000,")
    assert main(["plot", str(out), "--out", str(tmp_path / "cost.svg")]) == 0
    assert (tmp_path / "cost.svg").read_text().startswith("<?xml")


def test_featsel_report_planted(capsys):
    assert main(["featsel-report", "--planted"]) == 0
    out = capsys.readouterr().out
    assert "kept predicates: 0 (retention 1.00), 1 (retention 1.00), 2 (retention 1.00)" in out
    planted = [line for line in out.splitlines() if " planted " in f" {line} "]
    assert planted and planted[0].split()[2:5] == ["3", "3", "3"]


def test_featsel_report_empty_stats(tmp_path, capsys):
    from phiaixi.config import load_config

    c = load_config(write_config(tmp_path))
    runner = Runner(c, 0)
    runner.advance(10)
    runner.save(tmp_path / "early.pkl")
    assert main(["featsel-report", "--checkpoint", str(tmp_path / "early.pkl")]) == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err
    assert "total" not in captured.out


def test_featsel_report_from_run(tmp_path, capsys):
    cfg = write_config(tmp_path, {**TINY, "seeds": [0]})
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")])
    capsys.readouterr()
    assert main(["featsel-report", "--checkpoint", str(tmp_path / "r" / "seed_0")]) == 0
    rows = [line.split() for line in capsys.readouterr().out.splitlines()[1:]]
    total = rows[-1]
    with open(tmp_path / "r" / "seed_0" / "checkpoint.pkl", "rb") as fh:
        runner = pickle.load(fh)
    assert int(total[1]) == 1489
    assert int(total[3]) == len(runner.agent.selected)
    assert sum(int(r[4]) for r in rows[:-1]) == len(runner.agent.selected)


def test_missing_checkpoint(tmp_path, capsys):
    assert main(["featsel-report", "--checkpoint", str(tmp_path / "nothing")]) == 2


def test_bdd_export_table(tmp_path, capsys):
    assert main(["bdd-export", "--table", "00000101", "--names", "x1,x2,x3"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("digraph")
    assert "x1" in dot and "x3" in dot and "x2" not in dot
    assert main(["bdd-export", "--table", "0101010"]) == 2


def test_bdd_export_checkpoint(tmp_path, capsys):
    cfg = write_config(tmp_path, {**TINY, "seeds": [0]})
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")])
    out = tmp_path / "rule.dot"
    assert main(["bdd-export", "--checkpoint", str(tmp_path / "r" / "seed_0"), "--out", str(out)]) == 0
    assert out.read_text().startswith("digraph")


def test_plot_rejects_unknown_csv(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    assert main(["plot", str(path)]) == 2
