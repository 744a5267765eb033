import json
import random

import pytest

from promptgauge.corpus import (
    IssueStatus,
    StopwordRatioDetector,
    compare_groups,
    corpus_stats,
    detect_english,
    load_corpus,
    lower_median,
    serialize_corpus,
    welch_ttest,
    with_language_flag,
)
from promptgauge.errors import CorpusParseError, InputError


def record(i, status="closed", prompts=("hello world",)):
    return {
        "id": f"conv-{i}",
        "issue_url": f"https://github.com/x/y/issues/{i}",
        "issue_status": status,
        "turns": [{"prompt": p, "response": "ok"} for p in prompts],
    }


class TestLoadCorpus:
    def test_empty_array(self):
        result = load_corpus(b"[]")
        assert result.conversations == ()
        assert result.notices == ()

    def test_duplicate_ids_first_kept(self):
        payload = json.dumps([record(1, prompts=("first",)),
                              record(1, prompts=("second",))])
        result = load_corpus(payload)
        assert len(result.conversations) == 1
        assert result.conversations[0].turns[0].prompt_raw == "first"
        assert len(result.notices) == 1
        assert result.notices[0].kind == "duplicate"

    def test_missing_field_reported_not_dropped_silently(self):
        bad = record(2)
        del bad["issue_status"]
        result = load_corpus(json.dumps([record(1), bad]))
        assert len(result.conversations) == 1
        notice = result.notices[0]
        assert notice.kind == "invalid"
        assert notice.record_id == "conv-2"
        assert "issue_status" in notice.detail

    def test_empty_prompt_rejected(self):
        result = load_corpus(json.dumps([record(1, prompts=("",))]))
        assert result.conversations == ()
        assert "empty prompt" in result.notices[0].detail

    def test_malformed_json_offset(self):
        with pytest.raises(CorpusParseError) as err:
            load_corpus(b'[{"id": }]')
        assert err.value.offset == 8  # points at the '}' where a value was due

    def test_unknown_fields_ignored(self):
        rec = record(1)
        rec["extra_field"] = {"nested": True}
        result = load_corpus(json.dumps([rec]))
        assert len(result.conversations) == 1

    def test_status_case_insensitive(self):
        result = load_corpus(json.dumps([record(1, status="CLOSED")]))
        assert result.conversations[0].issue_status is IssueStatus.CLOSED

    def test_unknown_schema(self):
        with pytest.raises(InputError):
            load_corpus(b"[]", schema="nope")

    def test_native_schema(self):
        doc = {"Sources": [{
            "URL": "https://github.com/x/y/issues/1",
            "State": "CLOSED",
            "ChatgptSharing": [{
                "URL": "https://chat.openai.com/share/abc",
                "Conversations": [{"Prompt": "hello world", "Answer": "hi"}],
            }],
        }]}
        result = load_corpus(json.dumps(doc), schema="devgpt-native")
        assert len(result.conversations) == 1
        conv = result.conversations[0]
        assert conv.id == "https://chat.openai.com/share/abc"
        assert conv.issue_status is IssueStatus.CLOSED

    def test_round_trip(self):
        payload = json.dumps([record(1), record(2, status="open",
                                                prompts=("a b", "c d"))])
        first = load_corpus(payload).conversations
        second = load_corpus(serialize_corpus(list(first))).conversations
        assert first == second


class TestDetectEnglish:
    def test_common_english_kept(self, lex):
        detector = StopwordRatioDetector(lex.stopwords)
        conv = load_corpus(json.dumps(
            [record(1, prompts=("How do I fix this null pointer?",))]
        )).conversations[0]
        assert detect_english(conv, detector) is True

    def test_code_only_prose_kept(self, lex):
        detector = StopwordRatioDetector(lex.stopwords)
        conv = load_corpus(json.dumps(
            [record(1, prompts=("x = foo(bar); y = baz(qux);",))]
        )).conversations[0]
        assert detect_english(conv, detector) is True

    def test_non_english_paragraph_flagged(self, lex):
        detector = StopwordRatioDetector(lex.stopwords)
        words = ("lorem ipsum dolor amet consectetur adipiscing elit sed "
                 "eiusmod tempor incididunt labore dolore magna aliqua enim "
                 "minim veniam quis nostrud")
        assert len(words.split()) >= 20
        conv = load_corpus(json.dumps([record(1, prompts=(words,))])).conversations[0]
        assert detect_english(conv, detector) is False

    def test_flagging_does_not_drop(self, lex):
        detector = StopwordRatioDetector(lex.stopwords)
        conv = load_corpus(json.dumps([record(1)])).conversations[0]
        flagged = with_language_flag(conv, detector)
        assert flagged.turns == conv.turns


def fv(**overrides):
    from promptgauge.features import CANONICAL_FEATURES

    values = {name: 0.0 for name in CANONICAL_FEATURES}
    values.update(overrides)
    return values


class TestCorpusStats:
    def make(self, statuses):
        return load_corpus(json.dumps(
            [record(i, status=s) for i, s in enumerate(statuses)]
        )).conversations

    def test_singleton_min_median_max(self):
        convs = self.make(["closed"])
        summary = corpus_stats(list(convs), [fv(words=7)])
        stats = summary.metrics_closed["words"]
        assert stats.minimum == stats.median == stats.maximum == 7

    def test_lower_middle_median(self):
        assert lower_median([1, 2, 3, 4]) == 2

    def test_group_sizes_sum(self):
        convs = self.make(["closed", "open", "closed"])
        summary = corpus_stats(list(convs), [fv(), fv(), fv()])
        assert summary.n_open + summary.n_closed == summary.n_conversations

    def test_empty_group_absent(self):
        convs = self.make(["closed", "closed"])
        summary = corpus_stats(list(convs), [fv(), fv()])
        assert summary.metrics_open == {}
        assert summary.n_open == 0

    def test_permutation_invariant(self):
        convs = list(self.make(["closed", "open", "closed", "open"]))
        feats = [fv(words=w) for w in (3, 9, 5, 1)]
        a = corpus_stats(convs, feats)
        paired = list(zip(convs, feats))
        random.Random(7).shuffle(paired)
        b = corpus_stats([c for c, _ in paired], [f for _, f in paired])
        assert a == b

    def test_language_excluded_does_not_change_other_group(self):
        convs = list(self.make(["closed", "open", "open"]))
        feats = [fv(words=5), fv(words=9), fv(words=11)]
        base = corpus_stats(convs, feats)
        flagged = convs[1]
        convs[1] = type(flagged)(
            id=flagged.id, issue_url=flagged.issue_url,
            issue_status=flagged.issue_status, turns=flagged.turns,
            language_ok=False,
        )
        after = corpus_stats(convs, feats)
        assert after.metrics_closed == base.metrics_closed
        assert after.n_open == base.n_open - 1

    def test_misaligned_features_rejected(self):
        convs = self.make(["closed"])
        with pytest.raises(InputError):
            corpus_stats(list(convs), [])


class TestWelch:
    def test_identical_groups_p_one(self):
        group = [1.0, 2.0, 3.0, 4.0]
        assert welch_ttest(group, list(group)) == pytest.approx(1.0)

    def test_separated_gaussians_significant(self):
        rng = random.Random(42)
        a = [rng.gauss(0, 1) for _ in range(200)]
        b = [rng.gauss(1, 1) for _ in range(200)]
        assert welch_ttest(a, b) < 0.001

    def test_symmetric(self):
        rng = random.Random(3)
        a = [rng.gauss(0, 1) for _ in range(50)]
        b = [rng.gauss(0.3, 2) for _ in range(80)]
        assert welch_ttest(a, b) == pytest.approx(welch_ttest(b, a), abs=1e-12)

    def test_zero_variance_equal_means(self):
        assert welch_ttest([2.0, 2.0, 2.0], [2.0, 2.0]) == 1.0

    def test_zero_variance_unequal_means(self):
        assert welch_ttest([2.0, 2.0, 2.0], [3.0, 3.0]) == 0.0

    def test_small_group_rejected(self):
        with pytest.raises(InputError):
            welch_ttest([1.0], [1.0, 2.0])

    def test_compare_groups_per_metric(self):
        open_rows = [fv(words=w) for w in (1, 2, 3)]
        closed_rows = [fv(words=w) for w in (7, 8, 9)]
        p = compare_groups(open_rows, closed_rows)
        assert p["words"] < 0.01
        assert p["flesch"] == 1.0  # constant zero in both groups
