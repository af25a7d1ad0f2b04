"""Hinglish cybercrime complaint triage toolkit.

Modules: corpus (data model + cleaning + splits), anonymizer (PII
redaction + normalization), augmenter (gated generative augmentation),
classifiers (transformer fine-tuning), baselines (TF-IDF + SVD pipelines),
evaluator (metrics + comparisons), service (REST API), cli/pipeline
(orchestration).
"""

__version__ = "0.1.0"
