"""Command-line entry point for the complaint triage toolkit."""

from __future__ import annotations

import csv as _csv
import json
import logging
import sys
from pathlib import Path

import click

from . import baselines, classifiers
from .anonymizer import NormalizationConfig, anonymize_corpus, redact
from .augmenter import EchoGenerator, TargetDistribution, augment_corpus
from .corpus import (
    DatasetSplit,
    clean as clean_corpus,
    read_complaint_csv,
    read_csv,
    split as split_corpus,
    standardize_labels,
    write_csv,
    write_split_manifest,
)
from .evaluator import EvaluationReport, ClassMetrics, compare as compare_reports, comparison_csv, comparison_markdown, evaluate
from .plots import save_comparison_chart, save_confusion_matrix
from .similarity import SimilarityGateConfig


@click.group()
@click.option("--verbose", is_flag=True, default=False)
def main(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--text-column", default="text")
@click.option("--label-column", default="category")
def ingest(input_path, output_path, text_column, label_column):
    """Read a raw delimited file into the complaint format."""
    complaints, report = read_csv(input_path, text_column=text_column, label_column=label_column)
    write_csv(complaints, output_path)
    click.echo(report.to_json())


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--drop-rare", multiple=True, help="source labels removed as too rare")
@click.option("--test-only", multiple=True, help="source labels present only in the test set")
@click.option("--report", "report_path", type=click.Path(), default=None)
def clean(input_path, output_path, drop_rare, test_only, report_path):
    """Dedup, drop empties, standardize labels."""
    complaints = read_complaint_csv(input_path)
    complaints, clean_report = clean_corpus(complaints)
    complaints, label_report = standardize_labels(complaints, drop_rare=drop_rare, test_only=test_only)
    report = clean_report.merged(label_report)
    write_csv(complaints, output_path)
    if report_path:
        Path(report_path).write_text(report.to_json(), encoding="utf-8")
    click.echo(report.to_json())


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--audit", is_flag=True, default=False, help="write a span report with original surfaces")
@click.option("--stopwords", "stopword_list", default="hinglish")
@click.option("--no-lemma", is_flag=True, default=False)
@click.option("--audit-out", type=click.Path(), default=None)
def anonymize(input_path, output_path, audit, stopword_list, no_lemma, audit_out):
    """Redact PII and normalize text."""
    complaints = read_complaint_csv(input_path)
    norm = NormalizationConfig(lemmatize=not no_lemma, stopword_list_id=stopword_list)
    if audit:
        lines = []
        for c in complaints:
            result = redact(c.text, audit_mode=True)
            lines.append(json.dumps({
                "id": c.id,
                "spans": [{"start": s.start, "end": s.end, "kind": s.kind, "surface": s.surface} for s in result.spans],
            }))
        audit_path = Path(audit_out or (str(output_path) + ".audit.jsonl"))
        audit_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    anonymized, stats = anonymize_corpus(complaints, norm)
    write_csv(anonymized, output_path)
    click.echo(json.dumps({"counts": stats.counts, "errors": len(stats.errors)}))


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--validation-fraction", default=0.2, type=float)
@click.option("--test-fraction", default=0.0, type=float)
@click.option("--seed", default=0, type=int)
def split(input_path, out_dir, validation_fraction, test_fraction, seed):
    """Stratified, deterministic train/validation(/test) split."""
    complaints = read_complaint_csv(input_path)
    test = []
    if test_fraction > 0:
        carve = split_corpus(complaints, validation_fraction=test_fraction, seed=seed + 1)
        complaints, test = carve.train, carve.validation
    result = split_corpus(complaints, validation_fraction=validation_fraction, seed=seed, test=test)
    out = Path(out_dir)
    write_csv(result.train, out / "train.csv")
    write_csv(result.validation, out / "validation.csv")
    write_csv(result.test, out / "test.csv")
    write_split_manifest(result, out)
    click.echo(json.dumps({"train": len(result.train), "validation": len(result.validation), "test": len(result.test)}))


def _load_split(split_dir: str) -> DatasetSplit:
    d = Path(split_dir)
    return DatasetSplit(
        train=read_complaint_csv(d / "train.csv"),
        validation=read_complaint_csv(d / "validation.csv"),
        test=read_complaint_csv(d / "test.csv") if (d / "test.csv").exists() else [],
        seed=0,
    )


@main.command()
@click.option("--split", "split_dir", required=True, type=click.Path(exists=True))
@click.option("--targets", "targets_file", type=click.Path(exists=True), default=None,
              help="JSON {class: target count}; defaults to the reference distribution")
@click.option("--theta", default=0.97, type=float)
@click.option("--mode", default="token_greedy_f1", type=click.Choice(["token_greedy_f1", "sentence_cosine"]))
@click.option("--budget-factor", default=20, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
def augment(split_dir, targets_file, theta, mode, budget_factor, seed, output_path, report_path):
    """Grow minority classes with gated paraphrase candidates."""
    ds = _load_split(split_dir)
    base_counts: dict[str, int] = {}
    for c in ds.train:
        base_counts[c.category or ""] = base_counts.get(c.category or "", 0) + 1
    if targets_file:
        targets = TargetDistribution({**base_counts, **json.loads(Path(targets_file).read_text())})
    else:
        targets = TargetDistribution.reference()
        for name, base in base_counts.items():
            targets.targets[name] = max(targets.targets.get(name, base), base)
    config = SimilarityGateConfig(theta=theta, mode=mode)
    additions, report = augment_corpus(ds, targets, EchoGenerator(seed=seed), config,
                                       budget_factor=budget_factor, seed=seed)
    write_csv(ds.train + additions, output_path)
    if report_path:
        Path(report_path).write_text(report.to_json(), encoding="utf-8")
    click.echo(report.to_json())


@main.command()
@click.option("--split", "split_dir", required=True, type=click.Path(exists=True))
@click.option("--model", "model_name", required=True, help=f"registry key: {sorted(classifiers.REGISTRY)}")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--max-sequence-length", default=128, type=int)
@click.option("--learning-rate", default=2e-5, type=float)
@click.option("--batch-size", default=16, type=int)
@click.option("--max-epochs", default=30, type=int)
@click.option("--seed", default=0, type=int)
def train(split_dir, model_name, out_dir, max_sequence_length, learning_rate, batch_size, max_epochs, seed):
    """Fine-tune one encoder with early stopping."""
    ds = _load_split(split_dir)
    spec = classifiers.ModelSpec(model_id=model_name, max_sequence_length=max_sequence_length)
    config = classifiers.TrainingConfig(
        learning_rate=learning_rate, batch_size=batch_size, max_epochs=max_epochs, seed=seed
    )
    model, history = classifiers.train(ds, spec, config)
    classifiers.save(model, out_dir, history)
    click.echo(json.dumps({"epochs": len(history), "best_metric": max(h["val_metric"] for h in history),
                           "fingerprint": model.fingerprint}))


@main.command()
@click.option("--split", "split_dir", required=True, type=click.Path(exists=True))
@click.option("--model", "model_name", required=True)
@click.option("--grid", "grid_file", type=click.Path(exists=True), default=None,
              help="JSON {learning_rates, batch_sizes, sequence_lengths}")
@click.option("--out", "out_file", type=click.Path(), default=None)
@click.option("--max-epochs", default=10, type=int)
def grid(split_dir, model_name, grid_file, out_file, max_epochs):
    """Grid search over learning rate / batch size (/ sequence length)."""
    ds = _load_split(split_dir)
    grids = json.loads(Path(grid_file).read_text()) if grid_file else {}
    spec = classifiers.ModelSpec(model_id=model_name)
    best, results = classifiers.grid_search(
        ds, spec,
        learning_rates=grids.get("learning_rates", classifiers.LEARNING_RATE_GRID),
        batch_sizes=grids.get("batch_sizes", classifiers.BATCH_SIZE_GRID),
        sequence_lengths=grids.get("sequence_lengths"),
        base_config=classifiers.TrainingConfig(max_epochs=max_epochs),
    )
    payload = {
        "best": {"learning_rate": best.learning_rate, "batch_size": best.batch_size},
        "results": [
            {"learning_rate": r.config.learning_rate, "batch_size": r.config.batch_size,
             "max_sequence_length": r.spec.max_sequence_length, "metric": r.metric, "error": r.error}
            for r in results
        ],
    }
    if out_file:
        Path(out_file).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    click.echo(json.dumps(payload["best"]))


@main.group()
def baseline():
    """Classical TF-IDF + SVD pipelines."""


@baseline.command("fit")
@click.option("--split", "split_dir", required=True, type=click.Path(exists=True))
@click.option("--kind", default="xgboost", type=click.Choice(sorted(set(baselines.KINDS) | set(baselines.KIND_ALIASES))))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--reduced-dimension", default=300, type=int)
@click.option("--seed", default=0, type=int)
def baseline_fit(split_dir, kind, out_dir, reduced_dimension, seed):
    ds = _load_split(split_dir)
    config = baselines.SparseFeaturizerConfig(reduced_dimension=reduced_dimension, seed=seed)
    model = baselines.fit(ds.train, kind=kind, config=config)
    baselines.save(model, out_dir)
    click.echo(json.dumps({"kind": model.kind, "fingerprint": model.fingerprint}))


@main.command()
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True))
@click.option("--text", required=True)
def predict(model_dir, text):
    """Classify one complaint with a saved transformer checkpoint."""
    model = classifiers.load(model_dir)
    result = classifiers.predict(model, text)
    click.echo(json.dumps({"label": result.label, "scores": result.scores}))


@main.command("evaluate")
@click.option("--model", "model_dir", required=True, type=click.Path(exists=True))
@click.option("--test", "test_file", required=True, type=click.Path(exists=True))
@click.option("--avg", "averaging", default="weighted", type=click.Choice(["weighted", "macro"]))
@click.option("--kind", default="transformer", type=click.Choice(["transformer", "baseline"]))
@click.option("--out", "out_dir", type=click.Path(), default=None)
def evaluate_cmd(model_dir, test_file, averaging, kind, out_dir):
    """Score a model on a labeled test file; writes JSON/CSV and a
    confusion-matrix figure when --out is given."""
    test = read_complaint_csv(test_file)
    allowed = frozenset(c.category for c in test if c.category)
    if kind == "transformer":
        model = classifiers.load(model_dir)
        name = model.spec.model_id
        pairs = [(c.category or "", classifiers.predict(model, c.text)) for c in test]
    else:
        model = baselines.load(model_dir)
        name = model.kind
        pairs = [(c.category or "", baselines.predict(model, c.text)) for c in test]
    report = evaluate(pairs, averaging=averaging, model_name=name, allowed_labels=allowed)
    click.echo(json.dumps({"accuracy": report.accuracy, "precision": report.precision,
                           "recall": report.recall, "f1": report.f1}))
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        with (out / "per_class.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["class", "precision", "recall", "f1", "support"])
            for cls, m in report.per_class.items():
                writer.writerow([cls, f"{m.precision:.4f}", f"{m.recall:.4f}", f"{m.f1:.4f}", m.support])
        save_confusion_matrix(report, out / "confusion_matrix.png")


@main.command("compare")
@click.argument("report_files", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
def compare_cmd(report_files, out_dir):
    """Rank evaluation reports (JSON files) into a comparison table."""
    reports = []
    for path in report_files:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        reports.append(EvaluationReport(
            model_name=data["model_name"],
            averaging=data["averaging"],
            per_class={k: ClassMetrics(**v) for k, v in data["per_class"].items()},
            accuracy=data["accuracy"],
            precision=data["precision"],
            recall=data["recall"],
            f1=data["f1"],
            confusion_matrix=data["confusion_matrix"],
            label_order=data["label_order"],
            excluded_classes=data.get("excluded_classes", []),
            zero_division_classes=data.get("zero_division_classes", []),
        ))
    rows = compare_reports(reports)
    click.echo(comparison_csv(rows), nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.csv").write_text(comparison_csv(rows), encoding="utf-8")
        (out / "comparison.md").write_text(comparison_markdown(rows), encoding="utf-8")
        save_comparison_chart(rows, out / "comparison.png")


@main.command()
@click.option("--model", "model_dir", required=True, type=click.Path())
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--storage", "storage_path", default="submissions.jsonl", type=click.Path())
@click.option("--no-privacy-mode", is_flag=True, default=False)
@click.option("--token", "tokens", multiple=True, help="accepted bearer tokens; none disables auth")
def serve(model_dir, port, host, storage_path, no_privacy_mode, tokens):
    """Run the classification REST service."""
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        model_dir=model_dir,
        storage_path=storage_path,
        privacy_mode=not no_privacy_mode,
        auth_tokens=list(tokens),
        host=host,
        port=port,
    )
    uvicorn.run(create_app(config), host=host, port=port)


@main.group()
def pipeline():
    """Full pipeline orchestration."""


@pipeline.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--artifacts", "artifacts_dir", required=True, type=click.Path())
def pipeline_run(config_path, artifacts_dir):
    """Execute every stage, skipping the ones whose fingerprints match."""
    import jsonschema

    from .pipeline import StageError, run_pipeline

    try:
        runner = run_pipeline(config_path, artifacts_dir)
    except jsonschema.ValidationError as exc:
        click.echo(f"invalid pipeline config: {exc.message}", err=True)
        sys.exit(2)
    except StageError as exc:
        click.echo(f"pipeline halted: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps({"executed": runner.executed, "skipped": runner.skipped,
                           "artifacts": str(runner.artifacts)}))


@main.command()
@click.option("--out", "output_path", required=True, type=click.Path())
@click.option("--samples-per-class", default=8, type=int)
@click.option("--seed", default=5, type=int)
def smoke(output_path, samples_per_class, seed):
    """Write the bundled synthetic smoke corpus in raw ingest format."""
    from .smoke import complaint_rows

    rows = complaint_rows(samples_per_class=samples_per_class, seed=seed)
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = _csv.DictWriter(fh, fieldnames=["text", "category"])
        writer.writeheader()
        writer.writerows(rows)
    click.echo(json.dumps({"rows": len(rows), "path": str(path)}))


if __name__ == "__main__":
    main()
