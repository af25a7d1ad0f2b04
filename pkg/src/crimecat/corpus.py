"""Complaint data model, ingestion, cleaning and deterministic splitting."""

from __future__ import annotations

import csv
import json
import random
import re
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .labels import CATEGORY_SET, UnknownLabelError, standardize

_WS = re.compile(r"\s+")


class IngestionError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


@dataclass
class Complaint:
    """One reported incident.

    source is "original" for ingested rows and "augmented" for generated
    paraphrases; augmented complaints always carry the id of the original
    they were derived from.
    """

    id: str
    text: str
    raw_category: Optional[str] = None
    category: Optional[str] = None
    source: str = "original"
    parent_id: Optional[str] = None

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError(f"complaint {self.id}: text is empty")
        if self.source not in ("original", "augmented"):
            raise ValueError(f"complaint {self.id}: bad source {self.source!r}")
        if (self.source == "augmented") != (self.parent_id is not None):
            raise ValueError(
                f"complaint {self.id}: source=augmented iff parent_id is set"
            )
        if self.category is not None and self.category not in CATEGORY_SET:
            raise ValueError(
                f"complaint {self.id}: category {self.category!r} outside the closed set"
            )


@dataclass
class CleaningReport:
    """Audit trail for the cleaning steps; counts must reconcile."""

    removed_duplicates: int = 0
    removed_missing: int = 0
    removed_rare_class: int = 0
    rare_class_names: list[str] = field(default_factory=list)
    excluded_test_only_classes: list[str] = field(default_factory=list)
    label_remap_count: int = 0

    def merged(self, other: "CleaningReport") -> "CleaningReport":
        return CleaningReport(
            removed_duplicates=self.removed_duplicates + other.removed_duplicates,
            removed_missing=self.removed_missing + other.removed_missing,
            removed_rare_class=self.removed_rare_class + other.removed_rare_class,
            rare_class_names=sorted(set(self.rare_class_names) | set(other.rare_class_names)),
            excluded_test_only_classes=sorted(
                set(self.excluded_test_only_classes) | set(other.excluded_test_only_classes)
            ),
            label_remap_count=self.label_remap_count + other.label_remap_count,
        )

    def total_removed(self) -> int:
        return self.removed_duplicates + self.removed_missing + self.removed_rare_class

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


@dataclass
class DatasetSplit:
    train: list[Complaint]
    validation: list[Complaint]
    test: list[Complaint]
    seed: int

    def __post_init__(self):
        ids = [c.id for part in (self.train, self.validation, self.test) for c in part]
        if len(ids) != len(set(ids)):
            raise ValueError("split partitions overlap by id")


def normalize_text_key(text: str) -> str:
    """Dedup key: case-folded, whitespace-collapsed."""
    return _WS.sub(" ", text).strip().casefold()


def ingest(
    records: Iterable[dict],
    text_column: str = "text",
    label_column: str = "category",
    id_prefix: str = "c",
) -> tuple[list[Complaint], CleaningReport]:
    """Build Complaints from parsed tabular rows.

    Rows with a missing/empty text field are dropped and counted; an absent
    column is a configuration error, not a per-row condition.
    """
    report = CleaningReport()
    complaints: list[Complaint] = []
    for i, row in enumerate(records):
        if text_column not in row:
            raise ConfigurationError(
                f"row {i}: missing column {text_column!r}; have {sorted(row)}"
            )
        text = row[text_column]
        if text is None or not str(text).strip() or str(text).strip().lower() == "nan":
            report.removed_missing += 1
            continue
        raw_label = row.get(label_column)
        if raw_label is not None:
            raw_label = str(raw_label).strip() or None
        complaints.append(
            Complaint(id=f"{id_prefix}{i:06d}", text=str(text), raw_category=raw_label)
        )
    return complaints, report


def read_csv(
    path: str | Path,
    text_column: str = "text",
    label_column: str = "category",
    id_prefix: str = "c",
) -> tuple[list[Complaint], CleaningReport]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise IngestionError(f"{path}: empty file, no header row")
            if text_column not in reader.fieldnames:
                raise ConfigurationError(
                    f"{path}: no column {text_column!r}; header is {reader.fieldnames}"
                )
            return ingest(reader, text_column, label_column, id_prefix)
    except csv.Error as exc:
        raise IngestionError(f"{path}: unreadable csv ({exc})") from exc


def write_csv(complaints: Sequence[Complaint], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(["id", "text", "raw_category", "category", "source", "parent_id"])
        for c in complaints:
            writer.writerow(
                [c.id, c.text, c.raw_category or "", c.category or "", c.source, c.parent_id or ""]
            )


def read_complaint_csv(path: str | Path) -> list[Complaint]:
    """Read a csv previously produced by write_csv (full field set)."""
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                Complaint(
                    id=row["id"],
                    text=row["text"],
                    raw_category=row["raw_category"] or None,
                    category=row["category"] or None,
                    source=row.get("source") or "original",
                    parent_id=row.get("parent_id") or None,
                )
            )
    return out


def clean(complaints: Sequence[Complaint]) -> tuple[list[Complaint], CleaningReport]:
    """Drop empty texts and exact duplicates (case-folded, whitespace-collapsed)."""
    report = CleaningReport()
    seen: set[str] = set()
    kept: list[Complaint] = []
    for c in complaints:
        if not c.text.strip():
            report.removed_missing += 1
            continue
        key = normalize_text_key(c.text)
        if key in seen:
            report.removed_duplicates += 1
            continue
        seen.add(key)
        kept.append(c)
    return kept, report


def standardize_labels(
    complaints: Sequence[Complaint],
    drop_rare: Sequence[str] = (),
    test_only: Sequence[str] = (),
) -> tuple[list[Complaint], CleaningReport]:
    """Apply the standardization map; drop configured rare/test-only labels.

    Unmapped labels outside both drop-lists raise UnknownLabelError.
    """
    drop_rare_set = set(drop_rare)
    test_only_set = set(test_only)
    report = CleaningReport()
    out: list[Complaint] = []
    for c in complaints:
        raw = c.raw_category
        if raw is None:
            raise ValueError(f"complaint {c.id}: raw_category not populated")
        if raw in test_only_set:
            report.removed_rare_class += 1
            if raw not in report.excluded_test_only_classes:
                report.excluded_test_only_classes.append(raw)
            continue
        if raw in drop_rare_set:
            report.removed_rare_class += 1
            if raw not in report.rare_class_names:
                report.rare_class_names.append(raw)
            continue
        category = standardize(raw)  # raises UnknownLabelError
        if category != raw:
            report.label_remap_count += 1
        out.append(
            Complaint(
                id=c.id,
                text=c.text,
                raw_category=raw,
                category=category,
                source=c.source,
                parent_id=c.parent_id,
            )
        )
    return out, report


def split(
    complaints: Sequence[Complaint],
    validation_fraction: float = 0.2,
    seed: int = 0,
    test: Sequence[Complaint] = (),
) -> DatasetSplit:
    """Stratified, seed-deterministic train/validation split.

    The test partition is a separate set and is passed through untouched.
    Every class must have at least 2 samples so that both train and
    validation see it.
    """
    if not 0 < validation_fraction < 1:
        raise ValueError(f"validation_fraction {validation_fraction} outside (0,1)")
    by_class: dict[str, list[Complaint]] = {}
    for c in complaints:
        if c.category is None:
            raise ValueError(f"complaint {c.id}: category not set; standardize first")
        by_class.setdefault(c.category, []).append(c)

    train: list[Complaint] = []
    validation: list[Complaint] = []
    for category in sorted(by_class):
        members = sorted(by_class[category], key=lambda c: c.id)
        if len(members) < 2:
            raise ValueError(
                f"class {category!r} has {len(members)} sample(s); "
                "classes with fewer than 2 samples must be removed upstream"
            )
        # str seeding is process-stable (sha512 based), unlike tuple hashing
        rng = random.Random(f"{seed}:{category}")
        rng.shuffle(members)
        n_val = round(len(members) * validation_fraction)
        n_val = max(1, min(n_val, len(members) - 1))
        validation.extend(members[:n_val])
        train.extend(members[n_val:])

    train.sort(key=lambda c: c.id)
    validation.sort(key=lambda c: c.id)
    return DatasetSplit(train=train, validation=validation, test=list(test), seed=seed)


def write_split_manifest(split_: DatasetSplit, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", split_.train), ("validation", split_.validation), ("test", split_.test)):
        (directory / f"{name}.ids").write_text(
            "".join(c.id + "\n" for c in part), encoding="utf-8"
        )
