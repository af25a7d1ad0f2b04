"""Classical comparison pipelines: TF-IDF features, truncated SVD, and
four classical classifiers behind the same prediction contract as the
transformer models."""

from __future__ import annotations

import hashlib
import json
import pickle
from collections import Counter
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.decomposition import TruncatedSVD
from sklearn.ensemble import AdaBoostClassifier, HistGradientBoostingClassifier, RandomForestClassifier
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.neighbors import KNeighborsClassifier

from .corpus import Complaint
from .prediction import PredictionResult, argmax_label

KINDS = ("gradient_boosted_trees", "random_forest", "adaptive_boosting", "k_nearest_neighbors")

# CLI-facing aliases
KIND_ALIASES = {
    "xgboost": "gradient_boosted_trees",
    "rf": "random_forest",
    "ada": "adaptive_boosting",
    "knn": "k_nearest_neighbors",
}


class BaselineConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class SparseFeaturizerConfig:
    max_vocabulary: int = 50000
    ngram_range: tuple[int, int] = (1, 1)
    idf_smoothing: bool = True
    reduced_dimension: int = 300
    n_estimators: int = 100
    k_neighbors: int = 5
    seed: int = 0


def _build_classifier(kind: str, config: SparseFeaturizerConfig):
    if kind == "gradient_boosted_trees":
        return HistGradientBoostingClassifier(max_iter=config.n_estimators, random_state=config.seed)
    if kind == "random_forest":
        return RandomForestClassifier(n_estimators=config.n_estimators, random_state=config.seed)
    if kind == "adaptive_boosting":
        return AdaBoostClassifier(n_estimators=config.n_estimators, random_state=config.seed)
    if kind == "k_nearest_neighbors":
        return KNeighborsClassifier(n_neighbors=config.k_neighbors)
    raise BaselineConfigurationError(f"unknown baseline kind {kind!r}; options: {KINDS}")


@dataclass
class BaselineModel:
    kind: str
    featurizer: TfidfVectorizer
    reducer: TruncatedSVD
    classifier: object
    label_order: list[str]
    majority_label: str
    config: SparseFeaturizerConfig
    train_ids_hash: str
    fingerprint: str = ""


def fit(
    train: Sequence[Complaint],
    kind: str = "gradient_boosted_trees",
    config: SparseFeaturizerConfig = SparseFeaturizerConfig(),
) -> BaselineModel:
    """Fit featurizer, reducer and classifier on the training partition only."""
    kind = KIND_ALIASES.get(kind, kind)
    if not train:
        raise ValueError("baseline fit: empty training set")
    labels = [c.category for c in train]
    if any(label is None for label in labels):
        raise ValueError("baseline fit: every complaint needs a category")

    featurizer = TfidfVectorizer(
        max_features=config.max_vocabulary,
        ngram_range=config.ngram_range,
        smooth_idf=config.idf_smoothing,
    )
    features = featurizer.fit_transform([c.text for c in train])
    realized_vocab = features.shape[1]
    if config.reduced_dimension >= realized_vocab:
        raise BaselineConfigurationError(
            f"reduced_dimension {config.reduced_dimension} >= realized vocabulary {realized_vocab}"
        )
    reducer = TruncatedSVD(n_components=config.reduced_dimension, random_state=config.seed)
    reduced = reducer.fit_transform(features)
    classifier = _build_classifier(kind, config)
    classifier.fit(reduced, labels)

    label_order = sorted(set(labels))
    majority_label = Counter(labels).most_common(1)[0][0]
    ids_hash = hashlib.sha256("\n".join(sorted(c.id for c in train)).encode()).hexdigest()
    model = BaselineModel(
        kind=kind,
        featurizer=featurizer,
        reducer=reducer,
        classifier=classifier,
        label_order=label_order,
        majority_label=majority_label,
        config=config,
        train_ids_hash=ids_hash,
    )
    model.fingerprint = hashlib.sha256(
        (ids_hash + kind + json.dumps(asdict(config), sort_keys=True)).encode()
    ).hexdigest()
    return model


def predict(model: BaselineModel, text: str) -> PredictionResult:
    """Same PredictionResult contract as the transformer path.

    Fully out-of-vocabulary text (all-zero feature vector) falls back to
    the training majority class, flagged in the result.
    """
    if not text or not text.strip():
        raise ValueError("predict: text is empty")
    features = model.featurizer.transform([text])
    if features.nnz == 0:
        scores = {name: 0.0 for name in model.label_order}
        scores[model.majority_label] = 1.0
        return PredictionResult(
            label=model.majority_label,
            scores=scores,
            model_fingerprint=model.fingerprint,
            flags=["out_of_vocabulary"],
        )
    reduced = model.reducer.transform(features)
    proba = np.asarray(model.classifier.predict_proba(reduced))[0]
    proba = np.clip(proba, 0.0, None)
    proba = proba / proba.sum() if proba.sum() > 0 else np.full_like(proba, 1 / len(proba))
    classes = list(model.classifier.classes_)
    scores = {name: 0.0 for name in model.label_order}
    for name, p in zip(classes, proba):
        scores[name] = float(p)
    return PredictionResult(
        label=argmax_label(scores, model.label_order),
        scores=scores,
        model_fingerprint=model.fingerprint,
    )


def save(model: BaselineModel, path: str | Path) -> Path:
    """Single binary blob + metadata JSON, mirroring the transformer
    checkpoint convention."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    with (path / "model.pkl").open("wb") as fh:
        pickle.dump(model, fh)
    metadata = {
        "kind": model.kind,
        "label_order": model.label_order,
        "config": asdict(model.config),
        "train_ids_hash": model.train_ids_hash,
        "fingerprint": model.fingerprint,
    }
    (path / "metadata.json").write_text(json.dumps(metadata, indent=2), encoding="utf-8")
    return path


def load(path: str | Path) -> BaselineModel:
    path = Path(path)
    blob = path / "model.pkl"
    if not blob.exists():
        raise FileNotFoundError(f"{blob} not found")
    with blob.open("rb") as fh:
        model = pickle.load(fh)
    metadata = json.loads((path / "metadata.json").read_text(encoding="utf-8"))
    if metadata["fingerprint"] != model.fingerprint:
        raise ValueError(f"fingerprint mismatch at {path}")
    return model
