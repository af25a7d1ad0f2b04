"""Embedding-based similarity scoring for the augmentation gate.

Two modes:
  token_greedy_f1 — greedy max-cosine matching between token embeddings;
    precision over candidate tokens, recall over source tokens, harmonic
    mean. This is the default gate score.
  sentence_cosine — cosine of pooled sentence embeddings.

The encoder is pluggable. The built-in hashing encoder assigns each token
a deterministic pseudo-random unit vector, which makes identical token
multisets score 1.0 and unrelated tokens near-orthogonal; it needs no
model download. A contextual-transformer encoder can be dropped in behind
the same protocol.
"""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass
from typing import Protocol

import numpy as np


@functools.lru_cache(maxsize=65536)
def _hashed_unit_vector(token: str, dim: int) -> np.ndarray:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class EncoderError(RuntimeError):
    pass


class Encoder(Protocol):
    def encode_tokens(self, text: str) -> np.ndarray:
        """(n_tokens, dim) embedding matrix for the text's tokens."""
        ...

    def encode_sentence(self, text: str) -> np.ndarray:
        """(dim,) pooled sentence embedding."""
        ...


class HashingEncoder:
    """Deterministic per-token unit vectors derived from a token hash."""

    def __init__(self, dim: int = 64):
        self.dim = dim

    def _token_vector(self, token: str) -> np.ndarray:
        return _hashed_unit_vector(token, self.dim)

    def encode_tokens(self, text: str) -> np.ndarray:
        tokens = text.split()
        if not tokens:
            raise EncoderError("no tokens to encode")
        return np.stack([self._token_vector(t.lower()) for t in tokens])

    def encode_sentence(self, text: str) -> np.ndarray:
        pooled = self.encode_tokens(text).mean(axis=0)
        norm = np.linalg.norm(pooled)
        return pooled / norm if norm > 0 else pooled


class TransformerEncoder:
    """Contextual embeddings via sentence-transformers (optional backend)."""

    def __init__(self, model_id: str = "sentence-transformers/all-MiniLM-L6-v2"):
        try:
            from sentence_transformers import SentenceTransformer  # type: ignore

            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise EncoderError(f"transformer encoder unavailable: {exc}") from exc

    def encode_tokens(self, text: str) -> np.ndarray:
        out = self._model.encode([text], output_value="token_embeddings")[0]
        return np.asarray(out)

    def encode_sentence(self, text: str) -> np.ndarray:
        return np.asarray(self._model.encode([text], normalize_embeddings=True)[0])


@dataclass(frozen=True)
class SimilarityGateConfig:
    theta: float = 0.97
    mode: str = "token_greedy_f1"  # or "sentence_cosine"
    encoder: Encoder = HashingEncoder()

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0,1]")
        if self.mode not in ("token_greedy_f1", "sentence_cosine"):
            raise ValueError(f"unknown similarity mode {self.mode!r}")


def _cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    an = a / np.clip(np.linalg.norm(a, axis=1, keepdims=True), 1e-12, None)
    bn = b / np.clip(np.linalg.norm(b, axis=1, keepdims=True), 1e-12, None)
    return an @ bn.T


def greedy_f1(source_emb: np.ndarray, candidate_emb: np.ndarray) -> float:
    """Greedy-matching F1 over a source-by-candidate cosine matrix."""
    sim = _cosine_matrix(np.asarray(source_emb, dtype=float), np.asarray(candidate_emb, dtype=float))
    # negative best-match cosines carry no matching signal; floor at 0 so the
    # harmonic mean stays well defined
    recall = max(float(sim.max(axis=1).mean()), 0.0)  # each source token's best match
    precision = max(float(sim.max(axis=0).mean()), 0.0)  # each candidate token's best match
    if precision + recall == 0:
        return 0.0
    f1 = 2 * precision * recall / (precision + recall)
    return float(min(max(f1, 0.0), 1.0))


def similarity(source: str, candidate: str, config: SimilarityGateConfig) -> float:
    """Score candidate against source in [0,1] per the configured mode."""
    if not source.strip() or not candidate.strip():
        raise ValueError("similarity: empty string")
    enc = config.encoder
    if config.mode == "token_greedy_f1":
        return greedy_f1(enc.encode_tokens(source), enc.encode_tokens(candidate))
    a, b = enc.encode_sentence(source), enc.encode_sentence(candidate)
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom <= 0:
        return 0.0
    return float(min(max(float(a @ b) / denom, 0.0), 1.0))
