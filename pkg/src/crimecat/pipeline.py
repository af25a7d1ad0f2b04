"""End-to-end pipeline: ingest -> clean -> anonymize -> split -> augment ->
train -> baseline -> evaluate -> compare.

Stages are content-addressed: each stage hashes its config section plus
its input artifacts, writes a manifest next to its outputs, and is
skipped on rerun when the fingerprint still matches.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Callable, Optional

import jsonschema
import yaml

from . import baselines, classifiers
from .anonymizer import NormalizationConfig, anonymize_corpus
from .augmenter import EchoGenerator, TargetDistribution, augment_corpus
from .corpus import (
    CleaningReport,
    DatasetSplit,
    clean,
    read_complaint_csv,
    read_csv,
    split as split_corpus,
    standardize_labels,
    write_csv,
    write_split_manifest,
)
from .evaluator import compare, comparison_csv, comparison_markdown, evaluate
from .plots import save_comparison_chart, save_confusion_matrix, save_training_history
from .similarity import SimilarityGateConfig

log = logging.getLogger(__name__)

PIPELINE_SCHEMA = {
    "type": "object",
    "required": ["input", "train"],
    "properties": {
        "input": {
            "type": "object",
            "required": ["path"],
            "properties": {
                "path": {"type": "string"},
                "text_column": {"type": "string"},
                "label_column": {"type": "string"},
            },
        },
        "labels": {
            "type": "object",
            "properties": {
                "drop_rare": {"type": "array", "items": {"type": "string"}},
                "test_only": {"type": "array", "items": {"type": "string"}},
            },
        },
        "anonymize": {
            "type": "object",
            "properties": {
                "stopword_list": {"type": "string"},
                "lemmatize": {"type": "boolean"},
                "remove_stopwords": {"type": "boolean"},
            },
        },
        "split": {
            "type": "object",
            "properties": {
                "validation_fraction": {"type": "number"},
                "test_fraction": {"type": "number"},
                "seed": {"type": "integer"},
            },
        },
        "augment": {
            "type": "object",
            "properties": {
                "enabled": {"type": "boolean"},
                "theta": {"type": "number"},
                "mode": {"type": "string"},
                "targets": {},
                "multiplier": {"type": "number"},
                "cap": {"type": "integer"},
                "budget_factor": {"type": "integer"},
                "seed": {"type": "integer"},
            },
        },
        "train": {
            "type": "object",
            "required": ["model"],
            "properties": {
                "model": {"type": "string"},
                "max_sequence_length": {"type": "integer"},
                "learning_rate": {"type": "number"},
                "batch_size": {"type": "integer"},
                "max_epochs": {"type": "integer"},
                "seed": {"type": "integer"},
            },
        },
        "baseline": {
            "type": "object",
            "properties": {
                "kind": {"type": "string"},
                "reduced_dimension": {"type": "integer"},
                "seed": {"type": "integer"},
            },
        },
        "evaluate": {
            "type": "object",
            "properties": {"averaging": {"type": "string", "enum": ["macro", "weighted"]}},
        },
    },
}


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def load_config(path: str | Path) -> dict:
    config = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    jsonschema.validate(config, PIPELINE_SCHEMA)
    return config


def _hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _fingerprint(section: dict, input_paths: list[Path]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(section, sort_keys=True, default=str).encode())
    for p in sorted(input_paths):
        h.update(str(p.name).encode())
        h.update(_hash_file(p).encode())
    return h.hexdigest()


class PipelineRunner:
    def __init__(self, config: dict, artifacts_dir: str | Path):
        self.config = config
        self.artifacts = Path(artifacts_dir)
        self.artifacts.mkdir(parents=True, exist_ok=True)
        self.executed: list[str] = []
        self.skipped: list[str] = []

    def _stage(self, name: str, section: dict, inputs: list[Path], outputs: list[Path], fn: Callable[[], None]) -> None:
        stage_dir = self.artifacts / name
        stage_dir.mkdir(parents=True, exist_ok=True)
        manifest_path = stage_dir / "manifest.json"
        try:
            fingerprint = _fingerprint(section, inputs)
        except OSError as exc:  # an input artifact is missing or unreadable
            raise StageError(name, exc) from exc
        if manifest_path.exists():
            previous = json.loads(manifest_path.read_text(encoding="utf-8"))
            if previous.get("fingerprint") == fingerprint and all(p.exists() for p in outputs):
                log.info("stage %s: fingerprint match, skipping", name)
                self.skipped.append(name)
                return
        try:
            fn()
        except Exception as exc:
            raise StageError(name, exc) from exc
        manifest = {
            "fingerprint": fingerprint,
            "outputs": [str(p) for p in outputs],
            "inputs": [str(p) for p in inputs],
        }
        manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        self.executed.append(name)

    def run(self) -> Path:
        cfg = self.config
        art = self.artifacts
        input_cfg = cfg["input"]
        source = Path(input_cfg["path"])

        # --- ingest + clean + standardize -------------------------------
        clean_dir = art / "clean"
        cleaned_csv = clean_dir / "cleaned.csv"
        clean_section = {**input_cfg, **cfg.get("labels", {})}

        def do_clean():
            complaints, ingest_report = read_csv(
                source,
                text_column=input_cfg.get("text_column", "text"),
                label_column=input_cfg.get("label_column", "category"),
            )
            complaints, clean_report = clean(complaints)
            labels_cfg = cfg.get("labels", {})
            complaints, label_report = standardize_labels(
                complaints,
                drop_rare=labels_cfg.get("drop_rare", ()),
                test_only=labels_cfg.get("test_only", ()),
            )
            report = ingest_report.merged(clean_report).merged(label_report)
            write_csv(complaints, cleaned_csv)
            (clean_dir / "cleaning_report.json").write_text(report.to_json(), encoding="utf-8")

        self._stage("clean", clean_section, [source], [cleaned_csv], do_clean)

        # --- anonymize ----------------------------------------------------
        anon_cfg = cfg.get("anonymize", {})
        anon_dir = art / "anonymize"
        anon_csv = anon_dir / "anonymized.csv"

        def do_anonymize():
            complaints = read_complaint_csv(cleaned_csv)
            norm = NormalizationConfig(
                remove_stopwords=anon_cfg.get("remove_stopwords", True),
                lemmatize=anon_cfg.get("lemmatize", True),
                stopword_list_id=anon_cfg.get("stopword_list", "hinglish"),
            )
            anonymized, stats = anonymize_corpus(complaints, norm)
            write_csv(anonymized, anon_csv)
            (anon_dir / "redaction_stats.json").write_text(
                json.dumps({"counts": stats.counts, "errors": stats.errors}, indent=2),
                encoding="utf-8",
            )

        self._stage("anonymize", anon_cfg, [cleaned_csv], [anon_csv], do_anonymize)

        # --- split --------------------------------------------------------
        split_cfg = cfg.get("split", {})
        split_dir = art / "split"
        split_files = [split_dir / f"{part}.csv" for part in ("train", "validation", "test")]

        def do_split():
            complaints = read_complaint_csv(anon_csv)
            seed = split_cfg.get("seed", 0)
            test_fraction = split_cfg.get("test_fraction", 0.1)
            if test_fraction > 0:
                # carve the held-out test set first, stratified, then split
                # the remainder into train/validation
                carve = split_corpus(complaints, validation_fraction=test_fraction, seed=seed + 1)
                remainder, test = carve.train, carve.validation
            else:
                remainder, test = complaints, []
            result = split_corpus(
                remainder,
                validation_fraction=split_cfg.get("validation_fraction", 0.2),
                seed=seed,
                test=test,
            )
            write_csv(result.train, split_files[0])
            write_csv(result.validation, split_files[1])
            write_csv(result.test, split_files[2])
            write_split_manifest(result, split_dir)

        self._stage("split", split_cfg, [anon_csv], split_files, do_split)

        # --- augment ------------------------------------------------------
        aug_cfg = cfg.get("augment", {"enabled": False})
        aug_dir = art / "augment"
        aug_train_csv = aug_dir / "train_augmented.csv"

        def do_augment():
            train_set = read_complaint_csv(split_files[0])
            validation = read_complaint_csv(split_files[1])
            test = read_complaint_csv(split_files[2])
            if not aug_cfg.get("enabled", False):
                write_csv(train_set, aug_train_csv)
                (aug_dir / "augmentation_report.json").write_text("{}", encoding="utf-8")
                return
            ds = DatasetSplit(train=train_set, validation=validation, test=test, seed=0)
            base_counts: dict[str, int] = {}
            for c in train_set:
                base_counts[c.category or ""] = base_counts.get(c.category or "", 0) + 1
            targets_cfg = aug_cfg.get("targets", "reference")
            if targets_cfg == "reference":
                targets = TargetDistribution.reference()
                # reference targets only cover the 14 canonical classes
                for name, base in base_counts.items():
                    targets.targets.setdefault(name, base)
                    targets.targets[name] = max(targets.targets[name], base)
            elif isinstance(targets_cfg, dict):
                targets = TargetDistribution({**base_counts, **targets_cfg})
            else:
                targets = TargetDistribution.scaled(
                    base_counts, aug_cfg.get("multiplier", 2.0), aug_cfg.get("cap")
                )
            gate_config = SimilarityGateConfig(
                theta=aug_cfg.get("theta", 0.97), mode=aug_cfg.get("mode", "token_greedy_f1")
            )
            client = EchoGenerator(seed=aug_cfg.get("seed", 0))
            additions, report = augment_corpus(
                ds, targets, client, gate_config,
                budget_factor=aug_cfg.get("budget_factor", 20),
                seed=aug_cfg.get("seed", 0),
            )
            write_csv(train_set + additions, aug_train_csv)
            (aug_dir / "augmentation_report.json").write_text(report.to_json(), encoding="utf-8")

        self._stage("augment", aug_cfg, split_files, [aug_train_csv], do_augment)

        # --- train transformer ---------------------------------------------
        train_cfg = cfg["train"]
        model_dir = art / "model"

        def do_train():
            ds = DatasetSplit(
                train=read_complaint_csv(aug_train_csv),
                validation=read_complaint_csv(split_files[1]),
                test=read_complaint_csv(split_files[2]),
                seed=0,
            )
            spec = classifiers.ModelSpec(
                model_id=train_cfg["model"],
                max_sequence_length=train_cfg.get("max_sequence_length", 128),
            )
            config = classifiers.TrainingConfig(
                learning_rate=train_cfg.get("learning_rate", 2e-5),
                batch_size=train_cfg.get("batch_size", 16),
                max_epochs=train_cfg.get("max_epochs", 30),
                seed=train_cfg.get("seed", 0),
            )
            model, history = classifiers.train(ds, spec, config)
            classifiers.save(model, model_dir, history)
            save_training_history(history, art / "train" / "history.png", title=train_cfg["model"])

        self._stage(
            "train", train_cfg, [aug_train_csv, split_files[1]],
            [model_dir / "weights.pt", model_dir / "metadata.json"], do_train,
        )

        # --- baseline -------------------------------------------------------
        base_cfg = cfg.get("baseline", {"kind": "gradient_boosted_trees"})
        baseline_dir = art / "baseline_model"

        def do_baseline():
            train_set = read_complaint_csv(aug_train_csv)
            config = baselines.SparseFeaturizerConfig(
                reduced_dimension=base_cfg.get("reduced_dimension", 300),
                seed=base_cfg.get("seed", 0),
            )
            model = baselines.fit(train_set, kind=base_cfg.get("kind", "gradient_boosted_trees"), config=config)
            baselines.save(model, baseline_dir)

        self._stage("baseline", base_cfg, [aug_train_csv], [baseline_dir / "model.pkl"], do_baseline)

        # --- evaluate + compare ----------------------------------------------
        eval_cfg = cfg.get("evaluate", {})
        eval_dir = art / "evaluate"
        comparison_files = [eval_dir / "comparison.csv", eval_dir / "comparison.md"]

        def do_evaluate():
            averaging = eval_cfg.get("averaging", "weighted")
            test = read_complaint_csv(split_files[2])
            if not test:
                test = read_complaint_csv(split_files[1])
            labels_present = frozenset(c.category for c in test if c.category)
            model = classifiers.load(model_dir)
            allowed = frozenset(model.label_order) | labels_present
            transformer_pairs = [(c.category or "", classifiers.predict(model, c.text)) for c in test]
            transformer_report = evaluate(
                transformer_pairs, averaging=averaging,
                model_name=train_cfg["model"], allowed_labels=allowed,
            )
            baseline_model = baselines.load(baseline_dir)
            baseline_pairs = [(c.category or "", baselines.predict(baseline_model, c.text)) for c in test]
            baseline_report = evaluate(
                baseline_pairs, averaging=averaging,
                model_name=baseline_model.kind, allowed_labels=allowed,
            )
            for report in (transformer_report, baseline_report):
                (eval_dir / f"report_{report.model_name}.json").write_text(report.to_json(), encoding="utf-8")
                save_confusion_matrix(report, eval_dir / f"confusion_{report.model_name}.png")
            rows = compare([transformer_report, baseline_report])
            comparison_files[0].write_text(comparison_csv(rows), encoding="utf-8")
            comparison_files[1].write_text(comparison_markdown(rows), encoding="utf-8")
            save_comparison_chart(rows, eval_dir / "comparison.png")

        self._stage(
            "evaluate", eval_cfg,
            [split_files[2], model_dir / "metadata.json", baseline_dir / "metadata.json"],
            comparison_files, do_evaluate,
        )

        # --- run manifest ----------------------------------------------------
        manifest = {
            "config_hash": hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest(),
            "input_hash": _hash_file(source),
            "executed": self.executed,
            "skipped": self.skipped,
        }
        (art / "run_manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        return art


def run_pipeline(config_path: str | Path, artifacts_dir: str | Path) -> PipelineRunner:
    config = load_config(config_path)
    runner = PipelineRunner(config, artifacts_dir)
    runner.run()
    return runner
