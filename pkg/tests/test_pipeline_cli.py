import csv
import json
import os
import subprocess
import sys

import pytest

from sentnet.cli import EXIT_CONFIG, EXIT_DATA, main
from sentnet.corpus import load_corpus, save_answer_key, save_corpus
from sentnet.pipeline import ConfigError, PipelineConfig, StageError, load_config, run_pipeline
from sentnet.synth import corrupt_labels, generate_synthetic_corpus, synthetic_answer_key


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    d = tmp_path_factory.mktemp("small")
    truth = generate_synthetic_corpus(k_topics=3, per_topic=20, seed=1)
    save_corpus(truth, d / "truth.csv")
    save_corpus(corrupt_labels(truth, 0.05, seed=1), d / "noisy.csv")
    save_answer_key(synthetic_answer_key(truth), d / "key.csv")
    return d


def fast(d, out, **kw):
    base = dict(corpus=str(d / "noisy.csv"), truth=str(d / "truth.csv"), answer_key=str(d / "key.csv"),
                output_dir=str(out), forest_trees=10, svm_epochs=10, thresholds="0:0.6:0.2")
    base.update(kw)
    return PipelineConfig(**base)


def test_run_outputs(small, tmp_path):
    res = run_pipeline(fast(small, tmp_path / "out"))
    out = tmp_path / "out"
    for name in ["sweep.csv", "curves.tsv", "threshold.json", "partition.csv", "labeled.csv",
                 "class_map.json", "ambiguity.json", "evaluation.json", "config.txt", "graph.graphml"]:
        assert (out / name).is_file(), name
    rows = json.loads((out / "evaluation.json").read_text())["rows"]
    assert {(r["model"], r["labeling"]) for r in rows} == {
        ("svm", "human"), ("svm", "community"), ("random_forest", "human"), ("random_forest", "community")}
    with open(out / "labeled.csv", newline="") as fh:
        labeled = list(csv.reader(fh))
    assert labeled[0] == ["sentence", "community_id"] and len(labeled) == 61
    assert json.loads((out / "threshold.json").read_text())["optimal_threshold"] == res.optimal_threshold
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".sentnet-")]


def test_run_deterministic(small, tmp_path):
    run_pipeline(fast(small, tmp_path / "a"))
    run_pipeline(fast(small, tmp_path / "a2"))
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    for name in names:
        if name == "config.txt":
            continue
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "a2" / name).read_bytes(), name


def test_unlabeled_run(small, tmp_path):
    c = load_corpus(small / "noisy.csv").unlabeled()
    save_corpus(c, tmp_path / "u.csv")
    res = run_pipeline(PipelineConfig(corpus=str(tmp_path / "u.csv"), output_dir=str(tmp_path / "o")))
    assert res.method == "fixed" and res.evaluation is None
    assert len(res.notices) == 2
    assert not (tmp_path / "o" / "sweep.csv").exists()
    assert (tmp_path / "o" / "labeled.csv").exists()


def test_failure_leaves_nothing(small, tmp_path):
    bad = tmp_path / "key.csv"
    bad.write_text("class,message_id\nTOPIC_0,x\n")
    with pytest.raises(StageError) as err:
        run_pipeline(fast(small, tmp_path / "out", answer_key=str(bad)))
    assert err.value.stage == "load" and err.value.is_data_error
    assert not (tmp_path / "out").exists()
    assert [p.name for p in tmp_path.iterdir()] == ["key.csv"]


def test_config_file_and_overrides(tmp_path):
    (tmp_path / "c.txt").write_text("# run\ncorpus = data/x.csv\nthresholds = 0.1:0.5:0.2\n"
                                    "stratified = yes\nsvm_lambda = 0.01\nforest_max_depth =\n")
    cfg = load_config(tmp_path / "c.txt", {"louvain_seed": 7})
    assert cfg.corpus == str(tmp_path / "data" / "x.csv")
    assert cfg.grid() == [0.1, 0.3, 0.5]
    assert cfg.stratified is True and cfg.svm_lambda == 0.01 and cfg.forest_max_depth is None
    assert cfg.louvain_seed == 7
    over = load_config(tmp_path / "c.txt", {"corpus": "other.csv"})
    assert over.corpus == "other.csv"


@pytest.mark.parametrize("text", ["corpus = a.csv\nbogus = 1\n", "corpus = a.csv\nlouvain_seed = x\n",
                                  "corpus = a.csv\nthresholds = 0.5\n", "corpus = a.csv\ntrain_ratio = 1.2\n",
                                  "no equals sign\n", "thresholds = 0:0.5:0.1\n"])
def test_bad_configs(tmp_path, text):
    (tmp_path / "c.txt").write_text(text)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "c.txt")


def test_cli_exit_codes(small, tmp_path, capsys):
    assert main(["run", "--corpus", str(tmp_path / "missing.csv"), "--output-dir", str(tmp_path / "o")]) == EXIT_DATA
    assert main(["run", "--corpus", str(small / "noisy.csv"), "--thresholds", "0.3",
                 "--output-dir", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "none.cfg")]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as e:
        main(["run", "--louvain-seed", "abc"])
    assert e.value.code == EXIT_CONFIG


def test_cli_stage_commands(small, tmp_path, capsys):
    d = tmp_path
    assert main(["synth", "--topics", "3", "--per-topic", "15", "--corrupt", "0.05", "--seed", "2",
                 "--truth-out", str(d / "t.csv"), "--answer-key-out", str(d / "k.csv"),
                 "--out", str(d / "c.csv")]) == 0
    assert main(["preprocess", "--corpus", str(d / "c.csv"), "--out", str(d / "terms.jsonl")]) == 0
    assert main(["vectorize", "--terms", str(d / "terms.jsonl"), "--vectors", str(d / "v.jsonl"),
                 "--vocab", str(d / "voc.json")]) == 0
    assert main(["sweep", "--corpus", str(d / "c.csv"), "--vectors", str(d / "v.jsonl"),
                 "--thresholds", "0:0.6:0.2", "--out-dir", str(d / "sw")]) == 0
    theta = json.loads((d / "sw" / "threshold.json").read_text())["optimal_threshold"]
    assert main(["graph", "--vectors", str(d / "v.jsonl"), "--threshold", str(theta),
                 "--format", "edge-list", "--out", str(d / "g.txt")]) == 0
    assert main(["detect", "--graph", str(d / "g.txt"), "--out", str(d / "p.csv")]) == 0
    assert main(["label", "--corpus", str(d / "c.csv"), "--partition", str(d / "p.csv"),
                 "--out", str(d / "labeled.csv")]) == 0
    assert main(["report", "--corpus", str(d / "c.csv"), "--partition", str(d / "p.csv"),
                 "--out-dir", str(d / "rep")]) == 0
    assert main(["train", "--vectors", str(d / "v.jsonl"), "--labels", str(d / "labeled.csv"),
                 "--label-column", "community_id", "--vocab", str(d / "voc.json"), "--model", "forest",
                 "--trees", "10", "--train-ratio", "0.8", "--out", str(d / "m.json")]) == 0
    capsys.readouterr()
    assert main(["evaluate", "--model", str(d / "m.json"), "--vectors", str(d / "v.jsonl"),
                 "--labels", str(d / "t.csv"), "--answer-key", str(d / "k.csv"),
                 "--class-map", str(d / "rep" / "class_map.json"), "--train-ratio", "0.8"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_total"] == 9 and 0.0 <= report["accuracy"] <= 1.0


def test_console_script_runs(tmp_path):
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "sentnet.cli", "synth", "--topics", "2", "--per-topic", "5",
                        "--out", str(tmp_path / "c.csv")], capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert len(load_corpus(tmp_path / "c.csv")) == 10
