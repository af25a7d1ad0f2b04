"""Stopword lists and a lightweight rule-based lemmatizer.

The corpus is code-mixed, so the default stopword list is English plus a
curated romanized-Hindi extension. Lemmatization is English suffix
stripping; tokens the rules don't recognize (including romanized Hindi)
pass through unchanged.
"""

from __future__ import annotations

from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

# Romanized-Hindi function words common in Hinglish complaints.
HINGLISH_EXTRA = frozenset(
    """
    aap ab apna apne aur bhi ek gaya gayi gaye hai hain ham hamara ho hoga
    hota hoti hua hui hum humne is jab jo ka kar karke karna kab ke ki ko koi
    kuch kya liye main mera mere meri mujhe na nahi nahin ne par phir raha
    rahe rahi sab sakta se tha the thi to tum un us uska uske uski usne vo
    wala wale wali woh ya yah ye
    """.split()
)

STOPWORD_LISTS: dict[str, frozenset[str]] = {
    "english": frozenset(ENGLISH_STOP_WORDS),
    "hinglish": frozenset(ENGLISH_STOP_WORDS) | HINGLISH_EXTRA,
    "none": frozenset(),
}


class UnknownStopwordListError(ValueError):
    def __init__(self, list_id: str):
        super().__init__(
            f"unknown stopword list {list_id!r}; available: {sorted(STOPWORD_LISTS)}"
        )


def stopwords(list_id: str) -> frozenset[str]:
    try:
        return STOPWORD_LISTS[list_id]
    except KeyError:
        raise UnknownStopwordListError(list_id) from None


# Irregular forms the suffix rules would butcher.
_IRREGULAR = {
    "children": "child",
    "men": "man",
    "women": "woman",
    "people": "person",
    "was": "be",
    "were": "be",
    "is": "be",
    "are": "be",
    "been": "be",
    "had": "have",
    "has": "have",
    "did": "do",
    "done": "do",
    "said": "say",
    "sent": "send",
    "told": "tell",
    "stolen": "steal",
    "stole": "steal",
    "took": "take",
    "taken": "take",
    "got": "get",
    "made": "make",
    "lost": "lose",
    "paid": "pay",
}

_VOWELS = set("aeiou")


def lemmatize_token(token: str) -> str:
    """Reduce one lowercase English token to a base form.

    Deliberately conservative: only common inflectional suffixes, never
    shortens below 3 characters, unknown shapes pass through.
    """
    if token in _IRREGULAR:
        return _IRREGULAR[token]
    n = len(token)
    if n <= 3 or not token.isalpha():
        return token
    if token.endswith("ies") and n > 4:
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    for suffix in ("ing", "ed"):
        if token.endswith(suffix) and n - len(suffix) >= 3:
            stem = token[: -len(suffix)]
            # doubled final consonant: stopped -> stop
            if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
                stem = stem[:-1]
            return stem
    return token
