"""End-to-end CLI tests driving the built binary."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("IDEPNN_CLI")
DATA = os.environ.get("IDEPNN_TEST_DATA")

pytestmark = pytest.mark.skipif(not CLI, reason="IDEPNN_CLI not set")


def run(*args, expect=0):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    assert proc.returncode == expect, f"{args}: rc={proc.returncode}\n{proc.stdout}{proc.stderr}"
    return proc


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("cli")
    run("synth", "--num-docs", 40, "--seed", 17, "--out", ws / "corpus.jsonl",
        "--schema-out", ws / "schema.json")
    return ws


def test_synth_outputs(workspace):
    lines = (workspace / "corpus.jsonl").read_text().strip().splitlines()
    assert len(lines) == 40
    schema = json.loads((workspace / "schema.json").read_text())
    assert schema["labels"][0]["label"] == "REL"


def test_candidates_summary(workspace):
    proc = run("candidates", "--corpus", workspace / "corpus.jsonl",
               "--schema", workspace / "schema.json", "--k-max", 3,
               "--out", workspace / "cands.jsonl")
    assert "candidates:" in proc.stdout
    rows = [json.loads(l) for l in (workspace / "cands.jsonl").read_text().splitlines()]
    assert all(r["sentence_distance"] <= 3 for r in rows)


def test_train_is_deterministic(workspace):
    common = ["train", "--corpus", workspace / "corpus.jsonl",
              "--schema", workspace / "schema.json", "--variant", "iDepNN-SDP",
              "--word-dim", 10, "--hidden-dim", 10, "--k-train", 2,
              "--max-epochs", 3, "--patience", 3, "--seed", 5]
    run(*common, "--model", workspace / "m1.bin", "--log", workspace / "m1.tsv")
    run(*common, "--model", workspace / "m2.bin")
    assert (workspace / "m1.bin").read_bytes() == (workspace / "m2.bin").read_bytes()
    log = (workspace / "m1.tsv").read_text().splitlines()
    assert log[0] == "epoch\tmean_loss\tdev_macro_f1"
    assert len(log) == 4  # header + 3 epochs


def test_predict_eval_ensemble_threshold(workspace):
    model = workspace / "m1.bin"
    run("predict", "--model", model, "--corpus", workspace / "corpus.jsonl",
        "--k-eval", 2, "--out", workspace / "preds.jsonl")
    lines = (workspace / "preds.jsonl").read_text().strip().splitlines()
    assert lines[0].startswith("#")
    items = [json.loads(l) for l in lines[1:]]
    assert items and all(0.0 < p["prob"] <= 1.0 for p in items)

    out_dir = workspace / "reports"
    proc = run("eval", "--model", model, "--model", model,
               "--corpus", workspace / "corpus.jsonl", "--k-eval", "0,1,2",
               "--ensemble", "--threshold", "0.85,0.90,0.95", "--out-dir", out_dir)
    assert "ensemble" in proc.stdout
    grid = json.loads((out_dir / "model0.json").read_text())
    assert len(grid) == 3
    assert {"train_k", "eval_k", "pr", "macro", "per_label"} <= set(grid[0])
    # threshold reports exist and counts are monotone
    counts = []
    for t in ("0.85", "0.90", "0.95"):
        cells = json.loads((out_dir / f"threshold_{t}.json").read_text())
        counts.append(sum(c["pr"] for c in cells))
    assert counts[0] >= counts[1] >= counts[2]
    assert (out_dir / "model0_k1_counts.tsv").read_text().startswith("k\ttp\tfp\tfn")

    run("ensemble", "--in", workspace / "preds.jsonl", "--in", workspace / "preds.jsonl",
        "--out", workspace / "merged.jsonl")
    merged = [json.loads(l) for l in
              (workspace / "merged.jsonl").read_text().strip().splitlines()[1:]]
    assert all(p["label"] != "NONE" for p in merged)


def test_inspect(workspace):
    corpus = [json.loads(l) for l in (workspace / "corpus.jsonl").read_text().splitlines()]
    doc = corpus[0]["id"]
    proc = run("inspect", "--corpus", workspace / "corpus.jsonl", "--doc", doc,
               "--e1", "T1", "--e2", "T2", "--dot", workspace / "path.dot")
    assert "NEXTS crossings" in proc.stdout
    assert "<e1>" in proc.stdout
    assert (workspace / "path.dot").read_text().startswith("graph")
    run("inspect", "--corpus", workspace / "corpus.jsonl", "--doc", doc,
        "--e1", "T1", "--e2", "T99", expect=2)


def test_gradcheck(workspace):
    proc = run("gradcheck", "--suite", "sequence", "--cases", 5, "--seed", 46)
    assert "max relative error" in proc.stdout


def test_ingest_conllu_and_standoff(workspace):
    assert DATA, "IDEPNN_TEST_DATA not set"
    proc = run("ingest", "--standoff-dir", DATA, "--out", workspace / "ingested.jsonl")
    assert "documents: 1" in proc.stdout
    assert "Visits: intra 1" in proc.stdout
    doc = json.loads((workspace / "ingested.jsonl").read_text().splitlines()[0])
    assert doc["mentions"][0]["etype"] == "Per"
    assert doc["relations"][0]["label"] == "Visits"

    # Corrupt CoNLL-U exits with the data-error code.
    bad = workspace / "bad"
    bad.mkdir()
    (bad / "x.conllu").write_text("1\ta\t_\tX\t_\t_\t9\tdep\t_\t_\n")
    run("ingest", "--standoff-dir", bad, "--out", workspace / "nope.jsonl", expect=2)


def test_usage_errors():
    run("train", "--corpus", "/nonexistent.jsonl", "--schema", "/nonexistent.json",
        "--model", "/tmp/x.bin", expect=2)
    run("definitely-not-a-subcommand", expect=2)
