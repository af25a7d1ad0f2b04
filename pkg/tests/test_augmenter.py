import pytest

from crimecat.augmenter import (
    AugmentationCandidate,
    EchoGenerator,
    TargetDistribution,
    augment_corpus,
    cleanup,
    gate,
    generate_candidates,
)
from crimecat.corpus import Complaint, DatasetSplit
from crimecat.similarity import SimilarityGateConfig


class DeadClient:
    model_id = "stub-dead"

    def generate(self, prompt, n, seed=None):
        raise ConnectionError("backend down")


def _complaint(i, text, category="Ransomware"):
    return Complaint(id=f"c{i}", text=text, category=category, raw_category=category)


class TestGenerateCandidates:
    def test_n_zero(self):
        assert generate_candidates(_complaint(1, "files encrypt ho gaye"), 0, EchoGenerator()) == []

    def test_dead_backend_yields_empty_not_exception(self):
        out = generate_candidates(_complaint(1, "files encrypt ho gaye"), 3, DeadClient())
        assert out == []

    def test_count_contract(self):
        out = generate_candidates(_complaint(1, "files encrypt ho gaye bitcoin demand"), 3, EchoGenerator())
        assert len(out) == 3


class TestCleanup:
    def test_enumerated_list_split(self):
        assert cleanup("1. A hua\n\n2. B hua") == ["A hua", "B hua"]

    def test_whitespace_collapse(self):
        assert cleanup("   text   here   ") == ["text here"]

    def test_blank_input(self):
        assert cleanup("\n\n") == []

    def test_short_fragments_dropped(self):
        assert cleanup("ok\nthis one stays") == ["this one stays"]

    def test_bullet_markers_stripped(self):
        assert cleanup("- paisa gaya\n* account hack") == ["paisa gaya", "account hack"]


class TestGate:
    def _config(self, theta=0.97):
        return SimilarityGateConfig(theta=theta)

    def test_above_threshold_accepted(self):
        cand = AugmentationCandidate("p", "paisa gaya", similarity=0.98)
        accepted, rejected = gate([cand], self._config())
        assert accepted == [cand] and cand.accepted

    def test_just_below_threshold_rejected(self):
        cand = AugmentationCandidate("p", "paisa gaya", similarity=0.9699)
        accepted, rejected = gate([cand], self._config())
        assert rejected == [cand]
        assert cand.rejection_reason == "below_threshold"

    def test_threshold_is_inclusive(self):
        cand = AugmentationCandidate("p", "paisa gaya", similarity=0.97)
        accepted, _ = gate([cand], self._config())
        assert accepted == [cand]

    def test_duplicate_of_existing_rejected(self):
        existing = {"paisa gaya"}
        cand = AugmentationCandidate("p", "Paisa  Gaya", similarity=0.99)
        _, rejected = gate([cand], self._config(), existing)
        assert rejected == [cand]
        assert cand.rejection_reason == "duplicate_of_existing"

    def test_accepted_candidates_join_dedup_set(self):
        first = AugmentationCandidate("p", "naya text hai", similarity=0.99)
        second = AugmentationCandidate("p", "naya text hai", similarity=0.99)
        accepted, rejected = gate([first, second], self._config())
        assert accepted == [first] and rejected == [second]

    def test_monotone_in_theta(self):
        import random

        rng = random.Random(0)
        candidates = [
            AugmentationCandidate("p", f"text {i}", similarity=rng.random()) for i in range(200)
        ]
        previous = None
        for theta in (0.1, 0.5, 0.9, 0.99):
            fresh = [AugmentationCandidate(c.parent_id, c.generated_text, c.similarity) for c in candidates]
            accepted, _ = gate(fresh, self._config(theta))
            texts = {c.generated_text for c in accepted}
            if previous is not None:
                assert texts <= previous
            previous = texts

    def test_accepted_invariant(self):
        with pytest.raises(ValueError):
            AugmentationCandidate("p", "x", accepted=True, rejection_reason="below_threshold")


class TestTargetDistribution:
    def test_reference_has_fourteen_classes(self):
        targets = TargetDistribution.reference()
        assert len(targets.targets) == 14
        assert targets.targets["Ransomware"] == 273
        assert targets.targets["Financial Fraud"] == 52517

    def test_validate_rejects_target_below_base(self):
        targets = TargetDistribution({"Ransomware": 5})
        with pytest.raises(ValueError):
            targets.validate_against({"Ransomware": 10})

    def test_scaled_policy(self):
        targets = TargetDistribution.scaled({"A": 10, "B": 100}, multiplier=3, cap=50)
        assert targets.targets == {"A": 30, "B": 50}


def _tiny_split(per_class=4):
    words = ["files", "encrypt", "bitcoin", "demand", "system", "locked", "urgent", "help"]
    train = [
        _complaint(i, " ".join(words[i % 4 : i % 4 + 4]) + f" case {i}")
        for i in range(per_class)
    ]
    validation = [_complaint(100 + i, f"validation sample number {i}") for i in range(2)]
    test = [_complaint(200 + i, f"test sample number {i}") for i in range(2)]
    return DatasetSplit(train=train, validation=validation, test=test, seed=0)


class TestAugmentCorpus:
    def test_reaches_target_with_echo_generator(self):
        ds = _tiny_split()
        targets = TargetDistribution({"Ransomware": 10})
        additions, report = augment_corpus(ds, targets, EchoGenerator(seed=1), seed=1)
        stats = report.per_class["Ransomware"]
        assert stats.base == 4 and stats.target == 10
        assert len(additions) + stats.base <= 10
        assert stats.accepted == len(additions)

    def test_additions_carry_parent_and_category(self):
        ds = _tiny_split()
        targets = TargetDistribution({"Ransomware": 8})
        additions, _ = augment_corpus(ds, targets, EchoGenerator(seed=2), seed=2)
        train_ids = {c.id for c in ds.train}
        for a in additions:
            assert a.source == "augmented"
            assert a.parent_id in train_ids
            assert a.category == "Ransomware"

    def test_target_equal_to_base_adds_nothing(self):
        ds = _tiny_split()
        targets = TargetDistribution({"Ransomware": 4})
        additions, report = augment_corpus(ds, targets, EchoGenerator(), seed=0)
        assert additions == []
        assert report.per_class["Ransomware"].accepted == 0

    def test_validation_and_test_untouched(self):
        ds = _tiny_split()
        before = ([(c.id, c.text) for c in ds.validation], [(c.id, c.text) for c in ds.test])
        augment_corpus(ds, TargetDistribution({"Ransomware": 8}), EchoGenerator(), seed=0)
        after = ([(c.id, c.text) for c in ds.validation], [(c.id, c.text) for c in ds.test])
        assert before == after

    def test_budget_exhaustion_is_warning_not_error(self):
        ds = _tiny_split()
        targets = TargetDistribution({"Ransomware": 50})
        additions, report = augment_corpus(
            ds, targets, EchoGenerator(seed=3), budget_factor=1, seed=3
        )
        stats = report.per_class["Ransomware"]
        assert stats.budget_exhausted
        assert stats.accepted < 46

    def test_dead_backend_completes_with_zero_additions(self):
        ds = _tiny_split()
        additions, report = augment_corpus(
            ds, TargetDistribution({"Ransomware": 8}), DeadClient(), budget_factor=2
        )
        assert additions == []
        assert report.per_class["Ransomware"].budget_exhausted
