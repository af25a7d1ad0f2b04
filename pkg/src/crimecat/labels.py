"""Closed category set and label standardization for cybercrime complaints.

The corpus arrives with verbose, overlapping source labels; downstream
everything operates on a fixed set of 14 simplified categories.
"""

from __future__ import annotations

# Simplified category names, in canonical order. This ordering is the
# default label_order persisted with trained models.
CATEGORIES: tuple[str, ...] = (
    "Child Abuse Material",
    "Cryptocurrency Crime",
    "Cyber Attack/Dependent Crimes",
    "Cyber Terrorism",
    "Cyber Trafficking",
    "Financial Fraud",
    "Gambling/Betting",
    "Hacking/Damage",
    "Other Cyber Crime",
    "Ransomware",
    "Rape or Sexual Abuse Content",
    "Sexually Explicit Content",
    "Sexually Obscene Content",
    "Social Media Crime",
)

CATEGORY_SET: frozenset[str] = frozenset(CATEGORIES)

# Source label -> simplified category. Total over the 14 source labels;
# anything outside this map must be handled explicitly (drop-list or error).
STANDARDIZATION_MAP: dict[str, str] = {
    "Any Other Cyber Crime": "Other Cyber Crime",
    "Child Pornography CPChild Sexual Abuse Material CSAM": "Child Abuse Material",
    "Cryptocurrency Crime": "Cryptocurrency Crime",
    "Cyber Attack/ Dependent Crimes": "Cyber Attack/Dependent Crimes",
    "Cyber Terrorism": "Cyber Terrorism",
    "Hacking Damage to computer computer system etc": "Hacking/Damage",
    "Online Cyber Trafficking": "Cyber Trafficking",
    "Online Financial Fraud": "Financial Fraud",
    "Online Gambling Betting": "Gambling/Betting",
    "Online and Social Media Related Crime": "Social Media Crime",
    "Ransomware": "Ransomware",
    "RapeGang Rape RGRSexually Abusive Content": "Rape or Sexual Abuse Content",
    "Sexually Explicit Act": "Sexually Explicit Content",
    "Sexually Obscene material": "Sexually Obscene Content",
}


class UnknownLabelError(ValueError):
    """Raised when a source label is neither mapped nor explicitly dropped."""

    def __init__(self, label: str):
        super().__init__(
            f"unknown source label {label!r}: not in the standardization map "
            "and not in the configured drop-list"
        )
        self.label = label


def standardize(raw_label: str) -> str:
    """Map one source label to its simplified category.

    Raises UnknownLabelError for anything outside the map; silent fallback
    into a catch-all class would corrupt training data.
    """
    try:
        return STANDARDIZATION_MAP[raw_label]
    except KeyError:
        raise UnknownLabelError(raw_label) from None


def is_category(name: str) -> bool:
    return name in CATEGORY_SET
