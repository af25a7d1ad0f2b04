import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from crimecat.cli import main
from crimecat.corpus import read_complaint_csv

RUNNER = CliRunner()


def run_ok(*args):
    result = RUNNER.invoke(main, [str(a) for a in args], catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Smoke corpus taken through ingest, clean, anonymize and split."""
    d = tmp_path_factory.mktemp("cliflow")
    run_ok("smoke", "--out", d / "raw.csv", "--samples-per-class", 6, "--seed", 5)
    run_ok("ingest", "--in", d / "raw.csv", "--out", d / "ingested.csv")
    run_ok("clean", "--in", d / "ingested.csv", "--out", d / "cleaned.csv")
    run_ok("anonymize", "--in", d / "cleaned.csv", "--out", d / "anon.csv", "--audit")
    run_ok("split", "--in", d / "anon.csv", "--out", d / "split",
           "--validation-fraction", 0.25, "--test-fraction", 0.2, "--seed", 3)
    return d


class TestIngestCleanAnonymize:
    def test_ingest_reports_counts(self, tmp_path):
        (tmp_path / "raw.csv").write_text("text,category\nkuch hua,Ransomware\n,Ransomware\n")
        result = run_ok("ingest", "--in", tmp_path / "raw.csv", "--out", tmp_path / "out.csv")
        assert json.loads(result.output)["removed_missing"] == 1

    def test_clean_dedups(self, tmp_path):
        (tmp_path / "in.csv").write_text(
            "id,text,raw_category,category,source,parent_id\n"
            "a,paisa gaya,Online Financial Fraud,,original,\n"
            "b,PAISA  GAYA,Online Financial Fraud,,original,\n"
        )
        result = run_ok("clean", "--in", tmp_path / "in.csv", "--out", tmp_path / "out.csv")
        report = json.loads(result.output)
        assert report["removed_duplicates"] == 1
        assert len(read_complaint_csv(tmp_path / "out.csv")) == 1

    def test_anonymized_corpus_has_no_pii(self, workdir):
        for c in read_complaint_csv(workdir / "anon.csv"):
            assert "@" not in c.text
            assert "gmail" not in c.text

    def test_audit_file_written(self, workdir):
        audit = Path(str(workdir / "anon.csv") + ".audit.jsonl")
        lines = [json.loads(l) for l in audit.read_text().splitlines()]
        assert any(entry["spans"] for entry in lines)
        kinds = {s["kind"] for entry in lines for s in entry["spans"]}
        assert kinds <= {"PERSON", "PHONE", "EMAIL", "ADDRESS", "WEBSITE", "MONEY"}


class TestSplit:
    def test_partitions_disjoint_and_complete(self, workdir):
        parts = {name: read_complaint_csv(workdir / "split" / f"{name}.csv")
                 for name in ("train", "validation", "test")}
        ids = [c.id for part in parts.values() for c in part]
        assert len(ids) == len(set(ids))
        total = len(read_complaint_csv(workdir / "anon.csv"))
        assert len(ids) == total

    def test_deterministic_across_runs(self, workdir, tmp_path):
        run_ok("split", "--in", workdir / "anon.csv", "--out", tmp_path / "s2",
               "--validation-fraction", 0.25, "--test-fraction", 0.2, "--seed", 3)
        for name in ("train", "validation", "test"):
            a = (workdir / "split" / f"{name}.ids").read_text()
            b = (tmp_path / "s2" / f"{name}.ids").read_text()
            assert a == b


class TestAugmentCommand:
    def test_targets_file_respected(self, workdir, tmp_path):
        counts = {}
        for c in read_complaint_csv(workdir / "split" / "train.csv"):
            counts[c.category] = counts.get(c.category, 0) + 1
        target = {"Ransomware": counts["Ransomware"] + 3}
        (tmp_path / "targets.json").write_text(json.dumps(target))
        result = run_ok("augment", "--split", workdir / "split",
                        "--targets", tmp_path / "targets.json",
                        "--out", tmp_path / "augmented.csv", "--seed", 2)
        report = json.loads(result.output)
        assert report["classes"]["Ransomware"]["target"] == target["Ransomware"]
        rows = read_complaint_csv(tmp_path / "augmented.csv")
        augmented = [c for c in rows if c.source == "augmented"]
        assert augmented and all(c.category == "Ransomware" for c in augmented)


@pytest.fixture(scope="module")
def trained_dirs(workdir, tmp_path_factory):
    d = tmp_path_factory.mktemp("models")
    run_ok("train", "--split", workdir / "split", "--model", "mini",
           "--out", d / "mini", "--learning-rate", 1e-3, "--max-epochs", 3, "--seed", 0)
    run_ok("baseline", "fit", "--split", workdir / "split", "--kind", "xgboost",
           "--out", d / "gbt", "--reduced-dimension", 10)
    return d


class TestTrainPredictEvaluate:
    def test_train_writes_checkpoint(self, trained_dirs):
        assert (trained_dirs / "mini" / "weights.pt").exists()
        assert (trained_dirs / "mini" / "history.json").exists()

    def test_predict(self, trained_dirs):
        result = run_ok("predict", "--model", trained_dirs / "mini",
                        "--text", "ransomware files encrypt bitcoin")
        body = json.loads(result.output)
        assert body["label"] in body["scores"]

    def test_evaluate_writes_report_and_figure(self, workdir, trained_dirs, tmp_path):
        result = run_ok("evaluate", "--model", trained_dirs / "mini",
                        "--test", workdir / "split" / "test.csv", "--out", tmp_path / "eval")
        body = json.loads(result.output)
        assert 0.0 <= body["f1"] <= 1.0
        assert (tmp_path / "eval" / "report.json").exists()
        assert (tmp_path / "eval" / "per_class.csv").exists()
        assert (tmp_path / "eval" / "confusion_matrix.png").stat().st_size > 0

    def test_evaluate_baseline_kind(self, workdir, trained_dirs, tmp_path):
        result = run_ok("evaluate", "--model", trained_dirs / "gbt", "--kind", "baseline",
                        "--test", workdir / "split" / "test.csv", "--out", tmp_path / "eval_b")
        assert (tmp_path / "eval_b" / "report.json").exists()

    def test_compare_renders_table_and_chart(self, workdir, trained_dirs, tmp_path):
        run_ok("evaluate", "--model", trained_dirs / "mini",
               "--test", workdir / "split" / "test.csv", "--out", tmp_path / "a")
        run_ok("evaluate", "--model", trained_dirs / "gbt", "--kind", "baseline",
               "--test", workdir / "split" / "test.csv", "--out", tmp_path / "b")
        result = run_ok("compare", tmp_path / "a" / "report.json", tmp_path / "b" / "report.json",
                        "--out", tmp_path / "cmp")
        assert result.output.splitlines()[0] == "model,accuracy,precision,recall,f1"
        assert (tmp_path / "cmp" / "comparison.csv").exists()
        assert (tmp_path / "cmp" / "comparison.md").exists()
        assert (tmp_path / "cmp" / "comparison.png").stat().st_size > 0


PIPELINE_CONFIG = """
input:
  path: {path}
split:
  validation_fraction: 0.25
  test_fraction: 0.2
  seed: 3
augment:
  enabled: true
  targets: scaled
  multiplier: 1.5
  seed: 2
train:
  model: mini
  learning_rate: 0.001
  max_epochs: 2
  batch_size: 8
baseline:
  kind: gradient_boosted_trees
  reduced_dimension: 10
"""


@pytest.fixture(scope="module")
def pipeline_dir(workdir, tmp_path_factory):
    d = tmp_path_factory.mktemp("pipe")
    config = d / "config.yaml"
    config.write_text(PIPELINE_CONFIG.format(path=workdir / "raw.csv"))
    return d


class TestPipeline:
    def test_full_run_executes_all_stages(self, pipeline_dir):
        result = run_ok("pipeline", "run", "--config", pipeline_dir / "config.yaml",
                        "--artifacts", pipeline_dir / "art")
        body = json.loads(result.output)
        assert body["executed"] == ["clean", "anonymize", "split", "augment", "train", "baseline", "evaluate"]
        assert body["skipped"] == []
        art = Path(body["artifacts"])
        assert (art / "model" / "weights.pt").exists()
        assert (art / "evaluate" / "comparison.csv").exists()
        assert (art / "evaluate" / "comparison.png").stat().st_size > 0
        assert (art / "run_manifest.json").exists()

    def test_rerun_skips_every_stage(self, pipeline_dir):
        result = run_ok("pipeline", "run", "--config", pipeline_dir / "config.yaml",
                        "--artifacts", pipeline_dir / "art")
        body = json.loads(result.output)
        assert body["executed"] == []
        assert body["skipped"] == ["clean", "anonymize", "split", "augment", "train", "baseline", "evaluate"]

    def test_config_change_reruns_downstream(self, pipeline_dir, workdir):
        changed = pipeline_dir / "config2.yaml"
        changed.write_text(
            PIPELINE_CONFIG.format(path=workdir / "raw.csv").replace("max_epochs: 2", "max_epochs: 3")
        )
        result = run_ok("pipeline", "run", "--config", changed, "--artifacts", pipeline_dir / "art")
        body = json.loads(result.output)
        assert "train" in body["executed"]
        assert "clean" in body["skipped"]

    def test_invalid_config_rejected(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("input:\n  path: x.csv\n")  # no train section
        result = RUNNER.invoke(main, ["pipeline", "run", "--config", str(bad),
                                      "--artifacts", str(tmp_path / "art")])
        assert result.exit_code == 2
        assert "invalid pipeline config" in result.output

    def test_stage_failure_reported(self, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_text("input:\n  path: missing.csv\ntrain:\n  model: mini\n")
        result = RUNNER.invoke(main, ["pipeline", "run", "--config", str(config),
                                      "--artifacts", str(tmp_path / "art")])
        assert result.exit_code == 1
        assert "pipeline halted" in result.output
