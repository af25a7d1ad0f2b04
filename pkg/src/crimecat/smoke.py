"""Synthetic smoke corpora: small, deterministic, constructed to order.

Three builders:
  separable_corpus — classes with disjoint keyword vocabularies; any
    reasonable model should learn it.
  order_corpus — classes distinguished only by token order (identical
    bag-of-words), so order-aware models beat bag-of-words pipelines.
  pii_texts — texts with known embedded emails/phones/urls for coverage
    checks.
  complaint_rows — a 14-class corpus in the raw ingest format (verbose
    source labels, sprinkled PII) for end-to-end pipeline runs.
"""

from __future__ import annotations

import random
from typing import Sequence

from .corpus import Complaint
from .labels import STANDARDIZATION_MAP

_FILLERS = (
    "mere saath dhokha hua",
    "please help karo sir",
    "maine complaint file ki hai",
    "kal raat ko incident hua",
    "bahut pareshan hoon",
    "koi action nahi hua abhi tak",
    "turant madad chahiye",
)

_CLASS_KEYWORDS: dict[str, Sequence[str]] = {
    "Financial Fraud": ("paise", "account", "upi", "transaction", "bank", "refund"),
    "Ransomware": ("ransomware", "files", "encrypt", "bitcoin", "decrypt", "locked"),
    "Social Media Crime": ("facebook", "instagram", "profile", "fake", "followers", "post"),
    "Hacking/Damage": ("hack", "password", "server", "breach", "malware", "system"),
    "Cyber Terrorism": ("threat", "bomb", "terror", "national", "attack", "warning"),
    "Gambling/Betting": ("betting", "casino", "satta", "game", "jackpot", "odds"),
    "Cryptocurrency Crime": ("crypto", "wallet", "exchange", "token", "mining", "coin"),
    "Cyber Trafficking": ("trafficking", "smuggle", "victim", "border", "trade", "network"),
    "Child Abuse Material": ("minor", "child", "material", "abuse", "images", "report"),
    "Rape or Sexual Abuse Content": ("assault", "abusive", "content", "video", "circulated", "survivor"),
    "Sexually Explicit Content": ("explicit", "clip", "shared", "viral", "unwanted", "obscene"),
    "Sexually Obscene Content": ("vulgar", "messages", "photos", "morphed", "blackmail", "demand"),
    "Cyber Attack/Dependent Crimes": ("ddos", "phishing", "exploit", "vulnerability", "botnet", "payload"),
    "Other Cyber Crime": ("complaint", "online", "issue", "unknown", "misuse", "problem"),
}

_REVERSE_MAP = {v: k for k, v in STANDARDIZATION_MAP.items()}


def separable_corpus(
    n_classes: int = 3,
    samples_per_class: int = 50,
    seed: int = 7,
    class_names: Sequence[str] | None = None,
) -> list[Complaint]:
    """Disjoint-vocabulary corpus: each sample carries 3 keywords unique to
    its class plus shared Hinglish filler."""
    rng = random.Random(seed)
    names = list(class_names) if class_names else list(_CLASS_KEYWORDS)[:n_classes]
    out = []
    counter = 0
    for name in names:
        keywords = _CLASS_KEYWORDS.get(name) or tuple(f"{name.lower()}kw{i}" for i in range(6))
        for _ in range(samples_per_class):
            picks = rng.sample(list(keywords), 3)
            filler = rng.choice(_FILLERS)
            words = picks + filler.split()
            rng.shuffle(words)
            counter += 1
            out.append(
                Complaint(
                    id=f"s{counter:05d}",
                    text=" ".join(words),
                    raw_category=_REVERSE_MAP.get(name, name),
                    category=name if name in _CLASS_KEYWORDS else None,
                )
            )
    return out


def order_corpus(
    samples_per_class: int = 120,
    seed: int = 11,
) -> list[Complaint]:
    """Token order carries the class; the bag of words does not.

    Every sample uses the same marker pair; class A sentences start with
    "paisa" and end with "wapas", class B the reverse. Filler tokens are a
    shared shuffled pool, so TF-IDF representations of the two classes are
    drawn from the same distribution.
    """
    rng = random.Random(seed)
    pool = ["account", "se", "transfer", "hua", "complaint", "online", "fraud", "police"]
    out = []
    counter = 0
    for name, first, last in (
        ("Financial Fraud", "paisa", "wapas"),
        ("Other Cyber Crime", "wapas", "paisa"),
    ):
        for _ in range(samples_per_class):
            middle = rng.sample(pool, 5)
            counter += 1
            out.append(
                Complaint(
                    id=f"o{counter:05d}",
                    text=" ".join([first] + middle + [last]),
                    raw_category=_REVERSE_MAP[name],
                    category=name,
                )
            )
    return out


_EMAIL_USERS = ("ravi.kumar", "neha_99", "support", "help.desk", "amit123")
_EMAIL_DOMAINS = ("gmail.com", "yahoo.in", "fraudmail.org", "bank-alerts.net")
_URL_HOSTS = ("www.fakebank.com", "http://lottery-win.in/claim", "https://secure-pay.org/login", "kbc-prize.xyz")


def pii_texts(n: int = 1000, seed: int = 21) -> list[tuple[str, dict[str, int]]]:
    """Synthetic Hinglish texts with embedded pattern-kind entities.

    Returns (text, expected counts per kind) pairs; every text embeds at
    least one entity.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        counts = {"EMAIL": 0, "PHONE": 0, "WEBSITE": 0}
        parts = [rng.choice(_FILLERS)]
        for kind in ("EMAIL", "PHONE", "WEBSITE"):
            how_many = rng.randint(0, 2)
            for _ in range(how_many):
                if kind == "EMAIL":
                    parts.append(f"{rng.choice(_EMAIL_USERS)}@{rng.choice(_EMAIL_DOMAINS)}")
                elif kind == "PHONE":
                    digits = "".join(str(rng.randint(0, 9)) for _ in range(9))
                    prefix = rng.choice(["", "+91 ", "0"])
                    parts.append(f"{prefix}9{digits}")
                else:
                    parts.append(rng.choice(_URL_HOSTS))
                counts[kind] += 1
                parts.append(rng.choice(("par", "se", "ko", "message aaya", "call aayi")))
        if sum(counts.values()) == 0:
            parts.append(f"{rng.choice(_EMAIL_USERS)}@{rng.choice(_EMAIL_DOMAINS)}")
            counts["EMAIL"] += 1
        out.append((" ".join(parts), counts))
    return out


def complaint_rows(samples_per_class: int = 8, seed: int = 5) -> list[dict]:
    """Raw ingest rows for all 14 classes, with PII sprinkled in and the
    verbose source labels of the original corpus."""
    rng = random.Random(seed)
    rows = []
    pii = pii_texts(14 * samples_per_class, seed=seed + 1)
    i = 0
    for name, keywords in _CLASS_KEYWORDS.items():
        for _ in range(samples_per_class):
            picks = rng.sample(list(keywords), 3)
            text = " ".join(picks) + " " + pii[i][0]
            rows.append({"text": text, "category": _REVERSE_MAP[name]})
            i += 1
    rng.shuffle(rows)
    return rows
