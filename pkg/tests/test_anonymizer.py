import re

import pytest
from hypothesis import given, settings, strategies as st

from crimecat.anonymizer import (
    NormalizationConfig,
    PLACEHOLDERS,
    PatternRecognizer,
    RedactionResult,
    anonymize_corpus,
    normalize,
    reconstruct_redacted,
    redact,
)
from crimecat.corpus import Complaint
from crimecat.textnorm import UnknownStopwordListError, lemmatize_token


class TestPlaceholders:
    def test_six_kinds_with_exact_tokens(self):
        assert PLACEHOLDERS == {
            "PERSON": "<PERSON>",
            "PHONE": "<PHONE>",
            "EMAIL": "<EMAIL>",
            "ADDRESS": "<ADDRESS>",
            "WEBSITE": "<WEBSITE>",
            "MONEY": "<MONEY>",
        }


class TestRedact:
    def test_phone(self):
        assert redact("call me at 9876543210").text == "call me at <PHONE>"

    def test_email(self):
        assert redact("mail bheja tha abc@xyz.com par").text == "mail bheja tha <EMAIL> par"

    def test_website_bare_domain(self):
        assert redact("check XYZ.com now").text == "check <WEBSITE> now"

    def test_website_with_scheme(self):
        assert redact("visit https://fraud-site.in/login asap").text == "visit <WEBSITE> asap"

    def test_phone_with_prefix_and_separators(self):
        assert redact("number +91 98765-43210 hai").text == "number <PHONE> hai"

    def test_money_pattern_fallback(self):
        assert redact("Rs. 50,000 transfer hue").text == "<MONEY> transfer hue"
        assert redact("maine ₹5000 diye").text == "maine <MONEY> diye"

    def test_idempotent_on_placeholder(self):
        assert redact("<PHONE>").text == "<PHONE>"

    def test_idempotence_general(self):
        text = "mail abc@x.com ya www.fraud.com par, phone 9876543210, Rs 500 gaya"
        once = redact(text).text
        assert redact(once).text == once

    def test_email_domain_not_rematched_as_website(self):
        result = redact("abc@xyz.com")
        assert result.text == "<EMAIL>"
        assert [s.kind for s in result.spans] == ["EMAIL"]

    def test_spans_sorted_and_non_overlapping(self):
        result = redact("9876543210 then abc@x.com then www.z.com", audit_mode=True)
        starts = [s.start for s in result.spans]
        assert starts == sorted(starts)
        for a, b in zip(result.spans, result.spans[1:]):
            assert a.end <= b.start

    def test_surface_absent_without_audit_mode(self):
        result = redact("call 9876543210")
        assert all(s.surface is None for s in result.spans)

    def test_span_reconstruction(self):
        original = "mail abc@x.com, phone 9876543210"
        result = redact(original, audit_mode=True)
        assert reconstruct_redacted(original, result.spans) == result.text
        assert result.spans[0].surface == "abc@x.com"

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            redact("")


_pii_parts = st.lists(
    st.one_of(
        st.sampled_from(["fraud hua", "paisa gaya", "help karo", "online scam"]),
        st.builds(lambda u, d: f"{u}@{d}", st.sampled_from(["ravi", "a.b", "x_1"]),
                  st.sampled_from(["gmail.com", "yahoo.in", "mail.org"])),
        st.builds(lambda d: f"9{d:09d}", st.integers(0, 999_999_999)),
        st.sampled_from(["www.fraud.com", "http://bad.in/x", "scam-site.xyz"]),
    ),
    min_size=1,
    max_size=6,
)


class TestRedactProperties:
    @given(_pii_parts)
    @settings(max_examples=60, deadline=None)
    def test_idempotence(self, parts):
        text = " ".join(parts)
        once = redact(text).text
        assert redact(once).text == once

    @given(_pii_parts)
    @settings(max_examples=60, deadline=None)
    def test_no_pattern_entities_survive(self, parts):
        text = " ".join(parts)
        out = redact(text).text
        assert "@" not in out
        assert not re.search(r"\d{10}", out)


class TestNormalize:
    def test_stopwords_and_lemmas(self):
        assert normalize("the accounts were hacked") == "account hack"

    def test_hinglish_stopwords(self):
        assert normalize("<EMAIL> se message aaya") == "<EMAIL> message aaya"

    def test_empty_result_permitted(self):
        assert normalize("the was were") == ""

    def test_placeholders_never_altered(self):
        out = normalize("<PHONE> <EMAIL> <MONEY> the hacking")
        assert out.startswith("<PHONE> <EMAIL> <MONEY>")

    def test_placeholder_with_edge_punctuation(self):
        assert "<EMAIL>" in normalize("message from <EMAIL>, kal raat")

    def test_unknown_stopword_list(self):
        with pytest.raises(UnknownStopwordListError):
            normalize("text", NormalizationConfig(stopword_list_id="martian"))

    def test_no_stopword_removal_when_disabled(self):
        out = normalize("the accounts", NormalizationConfig(remove_stopwords=False, lemmatize=False))
        assert out == "the accounts"

    def test_order_preserved(self):
        assert normalize("hacking accounts banks") == "hack account bank"


class TestLemmatizer:
    @pytest.mark.parametrize(
        "token,lemma",
        [("accounts", "account"), ("hacked", "hack"), ("stopped", "stop"),
         ("parties", "party"), ("was", "be"), ("paisa", "paisa"), ("bheja", "bheja")],
    )
    def test_examples(self, token, lemma):
        assert lemmatize_token(token) == lemma


class TestAnonymizeCorpus:
    def test_clean_batch_zero_redactions(self):
        batch = [Complaint(id="a", text="sab theek hai"), Complaint(id="b", text="koi dikkat nahi")]
        out, stats = anonymize_corpus(batch)
        assert len(out) == 2
        assert stats.counts == {}

    def test_counts_per_kind(self):
        batch = [
            Complaint(id="a", text="phone 9876543210 hai"),
            Complaint(id="b", text="mail abc@x.com aaya"),
        ]
        _, stats = anonymize_corpus(batch)
        assert stats.counts == {"PHONE": 1, "EMAIL": 1}

    def test_empty_batch(self):
        out, stats = anonymize_corpus([])
        assert out == [] and stats.counts == {}

    def test_item_error_does_not_abort_batch(self):
        class Exploding(PatternRecognizer):
            def detect(self, text):
                if "boom" in text:
                    raise RuntimeError("backend down")
                return super().detect(text)

        batch = [Complaint(id="a", text="boom"), Complaint(id="b", text="theek hai sab")]
        out, stats = anonymize_corpus(batch, recognizer=Exploding())
        assert len(out) == 1
        assert stats.errors and stats.errors[0][0] == "a"

    def test_fail_fast(self):
        class Exploding(PatternRecognizer):
            def detect(self, text):
                raise RuntimeError("down")

        with pytest.raises(RuntimeError):
            anonymize_corpus([Complaint(id="a", text="x y")], recognizer=Exploding(), fail_fast=True)
