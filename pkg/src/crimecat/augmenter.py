"""Gated generative augmentation for minority classes.

Minority-class complaints are paraphrased by a pluggable generator client,
cleaned, scored for similarity against their source, and accepted only
above a strict threshold (default 0.97). Validation and test partitions
are never touched.
"""

from __future__ import annotations

import json
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from .anonymizer import redact
from .corpus import Complaint, DatasetSplit, normalize_text_key
from .similarity import SimilarityGateConfig, similarity

log = logging.getLogger(__name__)

# Per-class corpus size after augmentation in the reference corpus
# (base count -> grown count). Loaded verbatim as the default targets.
REFERENCE_TARGETS: dict[str, int] = {
    "Financial Fraud": 52517,
    "Social Media Crime": 12086,
    "Other Cyber Crime": 10826,
    "Cyber Attack/Dependent Crimes": 3625,
    "Sexually Obscene Content": 6570,
    "Hacking/Damage": 8091,
    "Sexually Explicit Content": 6118,
    "Cryptocurrency Crime": 2579,
    "Gambling/Betting": 2640,
    "Child Abuse Material": 1672,
    "Rape or Sexual Abuse Content": 258,
    "Cyber Trafficking": 889,
    "Cyber Terrorism": 1150,
    "Ransomware": 273,
}

DEFAULT_PROMPT_TEMPLATE = (
    "Paraphrase the following cybercrime complaint. Preserve the meaning, "
    "keep placeholder tokens like <PHONE> or <EMAIL> verbatim, and keep the "
    "same mix of Hindi and English. Write each paraphrase on its own line.\n\n"
    "Complaint: {text}\n"
)


class GeneratorClient(Protocol):
    """Completion backend; pure client with no corpus knowledge."""

    model_id: str

    def generate(self, prompt: str, n: int, seed: Optional[int] = None) -> list[str]:
        ...


class EchoGenerator:
    """Deterministic stub backend for tests and smoke runs.

    Emits token permutations of the complaint embedded in the prompt
    (high-similarity candidates under token-level scoring) plus the
    occasional off-topic filler line that the gate should reject.
    """

    model_id = "stub-echo"

    def __init__(self, seed: int = 0, noise_every: int = 4):
        self._rng = random.Random(seed)
        self.noise_every = noise_every
        self._calls = 0

    def generate(self, prompt: str, n: int, seed: Optional[int] = None) -> list[str]:
        match = re.search(r"Complaint: (.+)\n", prompt, re.DOTALL)
        source = match.group(1).strip() if match else prompt.strip()
        rng = random.Random(seed) if seed is not None else self._rng
        out = []
        tokens = source.split()
        for _ in range(n):
            self._calls += 1
            if self.noise_every and self._calls % self.noise_every == 0:
                out.append("completely unrelated filler about nothing in particular")
            else:
                shuffled = tokens[:]
                rng.shuffle(shuffled)
                out.append(" ".join(shuffled))
        return out


@dataclass
class AugmentationCandidate:
    parent_id: str
    generated_text: str
    similarity: float = 0.0
    accepted: bool = False
    rejection_reason: Optional[str] = None  # below_threshold | empty_after_cleanup | duplicate_of_existing

    def __post_init__(self):
        if self.accepted and self.rejection_reason is not None:
            raise ValueError("accepted candidate cannot carry a rejection_reason")


@dataclass
class TargetDistribution:
    targets: dict[str, int]

    def validate_against(self, base_counts: dict[str, int]) -> None:
        for cls, base in base_counts.items():
            if self.targets.get(cls, base) < base:
                raise ValueError(
                    f"target for {cls!r} ({self.targets[cls]}) below base count {base}"
                )

    @classmethod
    def reference(cls) -> "TargetDistribution":
        return cls(dict(REFERENCE_TARGETS))

    @classmethod
    def scaled(cls, base_counts: dict[str, int], multiplier: float, cap: Optional[int] = None) -> "TargetDistribution":
        """Formula policy for new corpora: target = min(cap, base * multiplier)."""
        targets = {}
        for name, base in base_counts.items():
            t = int(round(base * multiplier))
            targets[name] = min(t, cap) if cap else t
        return cls(targets)


def generate_candidates(
    complaint: Complaint,
    n: int,
    client: GeneratorClient,
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
    seed: Optional[int] = None,
    retries: int = 2,
) -> list[str]:
    """Up to n raw completions; backend failure yields an empty list after
    retries (the batch keeps going)."""
    if n <= 0:
        return []
    prompt = prompt_template.format(text=complaint.text)
    for attempt in range(retries + 1):
        try:
            return client.generate(prompt, n, seed=seed)[:n]
        except Exception as exc:
            log.warning("generation failed for %s (attempt %d): %s", complaint.id, attempt + 1, exc)
    return []


_LIST_MARKER = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*")
_WS = re.compile(r"\s+")


def cleanup(raw: str, min_tokens: int = 2) -> list[str]:
    """Split one raw completion into candidate sentences.

    Strips list markers and numbering, collapses whitespace, splits on
    blank lines / enumeration boundaries, drops empties and fragments
    shorter than min_tokens.
    """
    out: list[str] = []
    for line in raw.splitlines():
        line = _LIST_MARKER.sub("", line)
        line = _WS.sub(" ", line).strip()
        if line and len(line.split()) >= min_tokens:
            out.append(line)
    return out


def gate(
    candidates: Sequence[AugmentationCandidate],
    config: SimilarityGateConfig,
    existing_texts: Optional[set[str]] = None,
) -> tuple[list[AugmentationCandidate], list[AugmentationCandidate]]:
    """Partition candidates by the similarity threshold and dedup check.

    Accepts iff similarity >= theta (inclusive) and the normalized text is
    not already in the corpus. existing_texts holds normalized keys and is
    extended with accepted candidates as the gate runs.
    """
    existing = existing_texts if existing_texts is not None else set()
    accepted, rejected = [], []
    for cand in candidates:
        key = normalize_text_key(cand.generated_text)
        if not key:
            cand.rejection_reason = "empty_after_cleanup"
            rejected.append(cand)
        elif cand.similarity < config.theta:
            cand.rejection_reason = "below_threshold"
            rejected.append(cand)
        elif key in existing:
            cand.rejection_reason = "duplicate_of_existing"
            rejected.append(cand)
        else:
            cand.accepted = True
            existing.add(key)
            accepted.append(cand)
    return accepted, rejected


@dataclass
class ClassAugmentationStats:
    base: int = 0
    target: int = 0
    attempted: int = 0
    accepted: int = 0
    rejected_by_reason: dict[str, int] = field(default_factory=dict)
    budget_exhausted: bool = False


@dataclass
class AugmentationReport:
    per_class: dict[str, ClassAugmentationStats] = field(default_factory=dict)
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    theta: float = 0.97
    mode: str = "token_greedy_f1"

    def to_json(self) -> str:
        payload = {
            "prompt_template": self.prompt_template,
            "theta": self.theta,
            "mode": self.mode,
            "classes": {
                name: {
                    "base": s.base,
                    "target": s.target,
                    "attempted": s.attempted,
                    "accepted": s.accepted,
                    "rejected_by_reason": s.rejected_by_reason,
                    "budget_exhausted": s.budget_exhausted,
                }
                for name, s in self.per_class.items()
            },
        }
        return json.dumps(payload, indent=2)


def augment_corpus(
    split: DatasetSplit,
    targets: TargetDistribution,
    client: GeneratorClient,
    config: SimilarityGateConfig = SimilarityGateConfig(),
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
    candidates_per_call: int = 3,
    budget_factor: int = 20,
    seed: int = 0,
    reanonymize: bool = True,
) -> tuple[list[Complaint], AugmentationReport]:
    """Grow minority classes of the training partition toward the targets.

    Round-robins each class's complaints through generate -> cleanup ->
    score -> gate until the class target is reached or the generation
    budget (budget_factor x deficit candidate attempts) runs out. Running
    out of budget is a warning in the report, not an error: a 0.97 gate is
    intentionally strict.
    """
    by_class: dict[str, list[Complaint]] = {}
    for c in split.train:
        by_class.setdefault(c.category or "", []).append(c)
    targets.validate_against({cls: len(ms) for cls, ms in by_class.items()})

    existing = {normalize_text_key(c.text) for c in split.train}
    report = AugmentationReport(prompt_template=prompt_template, theta=config.theta, mode=config.mode)
    additions: list[Complaint] = []
    counter = 0

    for cls in sorted(by_class):
        members = sorted(by_class[cls], key=lambda c: c.id)
        stats = ClassAugmentationStats(base=len(members), target=targets.targets.get(cls, len(members)))
        report.per_class[cls] = stats
        deficit = stats.target - stats.base
        if deficit <= 0:
            continue
        budget = budget_factor * deficit
        idx = 0
        while stats.accepted < deficit and stats.attempted < budget:
            source = members[idx % len(members)]
            idx += 1
            raws = generate_candidates(
                source, candidates_per_call, client,
                prompt_template=prompt_template, seed=seed + stats.attempted,
            )
            cands = []
            for raw in raws:
                pieces = cleanup(raw)
                stats.attempted += len(pieces) or 1
                if not pieces:
                    rej = AugmentationCandidate(source.id, raw, 0.0, rejection_reason="empty_after_cleanup")
                    stats.rejected_by_reason["empty_after_cleanup"] = (
                        stats.rejected_by_reason.get("empty_after_cleanup", 0) + 1
                    )
                    continue
                for piece in pieces:
                    try:
                        score = similarity(source.text, piece, config)
                    except ValueError:
                        score = 0.0
                    cands.append(AugmentationCandidate(source.id, piece, score))
            accepted, rejected = gate(cands, config, existing)
            for r in rejected:
                reason = r.rejection_reason or "below_threshold"
                stats.rejected_by_reason[reason] = stats.rejected_by_reason.get(reason, 0) + 1
            for a in accepted:
                if stats.accepted >= deficit:
                    break
                text = a.generated_text
                if reanonymize:
                    # generation can reintroduce entity-like strings
                    text = redact(text).text
                counter += 1
                additions.append(
                    Complaint(
                        id=f"aug{counter:06d}",
                        text=text,
                        raw_category=source.raw_category,
                        category=cls,
                        source="augmented",
                        parent_id=source.id,
                    )
                )
                stats.accepted += 1
            if not raws and idx >= len(members):
                # backend persistently empty; charge the budget so we halt
                stats.attempted += candidates_per_call
        if stats.accepted < deficit:
            stats.budget_exhausted = True
            log.warning("class %s: budget exhausted at %d/%d additions", cls, stats.accepted, deficit)

    return additions, report
