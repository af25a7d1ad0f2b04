"""File-backed submission store for the classification service.

JSON-lines on disk behind a small interface; swap for a real database by
implementing the same three methods. Writes are serialized with a lock.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, asdict, field
from pathlib import Path
from typing import Optional


@dataclass
class Submission:
    id: str
    received_at: float  # unix epoch, UTC
    anonymized_text: str
    prediction_label: str
    prediction_scores: dict[str, float]
    model_fingerprint: str
    status: str = "auto_classified"  # auto_classified | reviewed
    operator_feedback: Optional[str] = None
    updated_at: float = 0.0

    def __post_init__(self):
        if self.status == "reviewed" and not self.operator_feedback:
            raise ValueError("reviewed submission must carry operator_feedback")
        if not self.updated_at:
            self.updated_at = self.received_at


class SubmissionStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._items: dict[str, Submission] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    sub = Submission(**json.loads(line))
                    self._items[sub.id] = sub

    def _flush(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for sub in self._items.values():
                fh.write(json.dumps(asdict(sub)) + "\n")
        tmp.replace(self.path)

    def add(self, sub: Submission) -> Submission:
        with self._lock:
            self._items[sub.id] = sub
            self._flush()
        return sub

    def get(self, submission_id: str) -> Optional[Submission]:
        return self._items.get(submission_id)

    def list(self, limit: int = 50, offset: int = 0) -> tuple[list[Submission], int]:
        items = sorted(self._items.values(), key=lambda s: s.received_at, reverse=True)
        return items[offset : offset + limit], len(items)

    def review(self, submission_id: str, corrected_label: str) -> Optional[Submission]:
        """Last-write-wins relabel; bumps updated_at monotonically."""
        with self._lock:
            sub = self._items.get(submission_id)
            if sub is None:
                return None
            sub.operator_feedback = corrected_label
            sub.status = "reviewed"
            sub.updated_at = max(time.time(), sub.updated_at + 1e-6)
            self._flush()
            return sub

    def reviewed(self) -> list[Submission]:
        return [s for s in self._items.values() if s.status == "reviewed"]


def new_submission_id() -> str:
    return uuid.uuid4().hex
