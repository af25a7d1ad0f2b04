"""Start the triage service with a 14-class smoke model for console tests.

Trains (or reuses) a small checkpoint, then serves on the given port.
"""

import argparse
import tempfile
from pathlib import Path

import uvicorn

from crimecat import classifiers
from crimecat.corpus import split as split_corpus
from crimecat.service import ServiceConfig, create_app
from crimecat.smoke import separable_corpus


def ensure_checkpoint(path: Path) -> Path:
    if (path / "metadata.json").exists():
        return path
    corpus = separable_corpus(14, 8, seed=7)
    ds = split_corpus(corpus, 0.2, seed=1)
    spec = classifiers.ModelSpec(model_id="mini")
    config = classifiers.TrainingConfig(learning_rate=1e-3, batch_size=16, max_epochs=4, seed=0)
    model, history = classifiers.train(ds, spec, config)
    classifiers.save(model, path, history)
    return path


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8901)
    parser.add_argument("--checkpoint", default=None)
    args = parser.parse_args()

    checkpoint = Path(args.checkpoint) if args.checkpoint else Path(tempfile.mkdtemp()) / "smoke-model"
    ensure_checkpoint(checkpoint)
    storage = checkpoint.parent / "submissions.jsonl"
    if storage.exists():
        storage.unlink()
    config = ServiceConfig(model_dir=str(checkpoint), storage_path=str(storage))
    uvicorn.run(create_app(config), host="127.0.0.1", port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
