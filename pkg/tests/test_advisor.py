import pytest

from promptgauge.advisor import (
    CLARITY_FAMILY,
    FAMILIES,
    RICHNESS_FAMILY,
    SPECIFICITY_FAMILY,
    CategoryScores,
    Direction,
    GapKind,
    TemplateFields,
    analyze,
    category_scores,
    detect_gaps,
    fields_to_prompt,
    generate_suggestions,
    load_calibration,
    report_to_json,
)
from promptgauge.errors import ContractError, InputError
from promptgauge.features import CANONICAL_FEATURES, FeatureVector


def vector(**overrides):
    values = {n: 0.0 for n in CANONICAL_FEATURES}
    values.update(overrides)
    return FeatureVector(values=values)


def uniform_calibration(direction="higher"):
    return {n: {"lo": 0.0, "hi": 1.0, "direction": direction}
            for n in CANONICAL_FEATURES}


class TestFieldsToPrompt:
    def test_description_only_verbatim(self):
        fields = TemplateFields(description="Just the description.")
        assert fields_to_prompt(fields) == "Just the description."

    def test_description_plus_snippet(self):
        fields = TemplateFields(description="Desc here.",
                                code_snippets=("x = 1",))
        assert fields_to_prompt(fields) == "Desc here.\n\n```\nx = 1\n```"

    def test_all_five_sections_in_order(self):
        fields = TemplateFields(
            description="Broken upload.",
            code_snippets=("a = 1", "b = 2"),
            error_log="ValueError: bad",
            libraries_frameworks="Flask 2.3",
            resources="https://a.example\nhttps://b.example",
        )
        expected = (
            "Broken upload.\n\n"
            "Environment: Flask 2.3\n\n"
            "```\na = 1\n```\n\n"
            "```\nb = 2\n```\n\n"
            "Error output:\n```\nValueError: bad\n```\n\n"
            "References:\n- https://a.example\n- https://b.example"
        )
        assert fields_to_prompt(fields) == expected

    def test_all_empty_rejected(self):
        with pytest.raises(InputError):
            fields_to_prompt(TemplateFields())

    def test_deterministic(self):
        fields = TemplateFields(description="Same.", resources="https://x.y")
        assert fields_to_prompt(fields) == fields_to_prompt(fields)


class TestCategoryScores:
    def test_families_partition_canonical_set(self):
        union = set(SPECIFICITY_FAMILY) | set(RICHNESS_FAMILY) | set(CLARITY_FAMILY)
        assert union == set(CANONICAL_FEATURES)
        assert len(SPECIFICITY_FAMILY) + len(RICHNESS_FAMILY) + len(CLARITY_FAMILY) == 24

    def test_all_at_lo_scores_zero(self):
        scores = category_scores(vector(), uniform_calibration("higher"))
        assert scores.contextual_richness == 0.0
        assert scores.specificity == 0.0
        assert scores.clarity == 0.0

    def test_all_at_hi_scores_hundred(self):
        values = {n: 1.0 for n in CANONICAL_FEATURES}
        scores = category_scores(FeatureVector(values=values),
                                 uniform_calibration("higher"))
        assert scores.contextual_richness == 100.0
        assert scores.specificity == 100.0
        assert scores.clarity == 100.0

    def test_lower_direction_inverts(self):
        scores = category_scores(vector(), uniform_calibration("lower"))
        assert scores.clarity == 100.0

    def test_missing_calibration_entry_rejected(self):
        cal = uniform_calibration()
        del cal["words"]
        with pytest.raises(ContractError):
            category_scores(vector(), cal)

    def test_clamped_outside_bounds(self):
        scores = category_scores(vector(words=50.0), uniform_calibration())
        # words clamps to 1.0; 1 of 11 richness features
        assert scores.contextual_richness == pytest.approx(100.0 / 11)


class TestDetectGaps:
    def test_perfect_scores_no_flags(self):
        flags = detect_gaps(CategoryScores(100.0, 100.0, 100.0), vector())
        assert flags == ()

    def test_paper_sparse_scores_flag_context_and_spec(self):
        flags = detect_gaps(CategoryScores(32.03, 40.0, 53.17), vector())
        kinds = {f.kind for f in flags}
        assert kinds == {GapKind.MISSING_CONTEXT, GapKind.MISSING_SPECIFICATION}

    def test_boundary_not_flagged(self):
        flags = detect_gaps(CategoryScores(50.0, 50.0, 50.0), vector())
        assert flags == ()

    def test_severity_relative_shortfall(self):
        flags = detect_gaps(CategoryScores(25.0, 100.0, 100.0), vector())
        assert len(flags) == 1
        assert flags[0].severity == pytest.approx(0.5)

    def test_custom_thresholds(self):
        flags = detect_gaps(CategoryScores(60.0, 60.0, 60.0), vector(),
                            thresholds={"specificity": 70.0})
        assert [f.kind for f in flags] == [GapKind.MISSING_SPECIFICATION]

    def test_evidence_stays_in_family(self):
        cal = uniform_calibration()
        flags = detect_gaps(CategoryScores(10.0, 10.0, 10.0), vector(),
                            calibration=cal)
        for flag in flags:
            family = FAMILIES[
                {GapKind.MISSING_CONTEXT: "contextual_richness",
                 GapKind.MISSING_SPECIFICATION: "specificity",
                 GapKind.UNCLEAR_INSTRUCTIONS: "clarity"}[flag.kind]]
            assert set(flag.evidence) <= set(family)

    def test_topic_shift_proxy(self, lex):
        from promptgauge.textmetrics import split_sentences

        first = "The upload fails on the server. " * 5
        last = "Now the website styling looks broken everywhere. " * 5
        sentences = split_sentences(first + last, lex)
        flags = detect_gaps(CategoryScores(100.0, 100.0, 100.0), vector(),
                            sentences=sentences)
        assert [f.kind for f in flags] == [GapKind.MULTIPLE_CONTEXT]
        assert flags[0].severity == 0.5

    def test_no_topic_shift_when_grams_shared(self, lex):
        from promptgauge.textmetrics import split_sentences

        same = "The upload fails on the server. " * 9
        sentences = split_sentences(same, lex)
        flags = detect_gaps(CategoryScores(100.0, 100.0, 100.0), vector(),
                            sentences=sentences)
        assert flags == ()


class TestGenerateSuggestions:
    def test_no_flags_no_suggestions(self, runtime):
        out = generate_suggestions((), vector(), runtime.model,
                                   runtime.calibration)
        assert out == ()

    def test_missing_context_targets_code_snippets(self, runtime):
        features = vector(mean_snippet_size=0.0, unique_info=0.9,
                          first_prompt_length=120, words=150, sentences=9,
                          unique_words=90, flesch=70, entailment=0.5)
        flags = detect_gaps(CategoryScores(30.0, 100.0, 100.0), features,
                            calibration=runtime.calibration)
        out = generate_suggestions(flags, features, runtime.model,
                                   runtime.calibration)
        targets = {s.target_feature: s.expected_direction for s in out}
        assert targets.get("code_snippets") is Direction.INCREASE

    def test_unclear_instructions_targets_misspellings(self, runtime):
        features = vector(misspellings=6.0, flesch=80.0, entailment=0.6,
                          smog=5.0)
        flags = detect_gaps(CategoryScores(100.0, 100.0, 40.0), features,
                            calibration=runtime.calibration)
        out = generate_suggestions(flags, features, runtime.model,
                                   runtime.calibration)
        targets = {s.target_feature: s.expected_direction for s in out}
        assert targets.get("misspellings") is Direction.DECREASE

    def test_directions_agree_with_model_signs(self, runtime):
        features = vector()
        flags = detect_gaps(CategoryScores(10.0, 10.0, 10.0), features,
                            calibration=runtime.calibration)
        out = generate_suggestions(flags, features, runtime.model,
                                   runtime.calibration)
        assert out  # flags present -> suggestions present
        for s in out:
            weight = runtime.model.weight_of(s.target_feature)
            if weight > 0:
                assert s.expected_direction is Direction.INCREASE
            elif weight < 0:
                assert s.expected_direction is Direction.DECREASE

    def test_ordered_by_weight_magnitude_within_flag(self, runtime):
        features = vector(misspellings=9.0, unresolved_references=4.0,
                          smog=15.0)
        flags = detect_gaps(CategoryScores(100.0, 100.0, 5.0), features,
                            calibration=runtime.calibration)
        out = [s for s in generate_suggestions(flags, features, runtime.model,
                                               runtime.calibration)]
        weights = [abs(runtime.model.weight_of(s.target_feature)) for s in out]
        assert weights == sorted(weights, reverse=True)


SPARSE = TemplateFields(
    description=("My Flask app crashes when uploading files. "
                 "I am using Python and Flask. How can I fix this?"),
)

RICH = TemplateFields(
    description=("My Flask 2.3 upload endpoint crashes with large files. "
                 "The handler must stream uploads and should use at least "
                 "8 MB chunks. I tried the FileStorage class but saveChunk "
                 "fails after the first chunk. The upload handler worked on "
                 "Ubuntu 20.04 with Python 3.8."),
    code_snippets=("@app.route(\"/upload\", methods=[\"POST\"])\n"
                   "def upload():\n"
                   "    f = request.files[\"file\"]\n"
                   "    saveChunk(f)",),
    error_log=("Traceback (most recent call last):\n"
               "  File \"app.py\", line 12, in upload\n"
               "ValueError: I/O operation on closed file"),
    libraries_frameworks="Flask 2.3, Python 3.8",
    resources="https://flask.example.com/uploads, https://werkzeug.example.com",
)


class TestAnalyze:
    def test_empty_input_rejected(self, runtime):
        with pytest.raises(InputError):
            analyze(runtime, fields=TemplateFields())

    def test_both_inputs_rejected(self, runtime):
        with pytest.raises(InputError):
            analyze(runtime, fields=SPARSE, raw_prompt="also this")

    def test_neither_input_rejected(self, runtime):
        with pytest.raises(InputError):
            analyze(runtime)

    def test_sparse_flags_context_and_specification(self, runtime):
        report = analyze(runtime, fields=SPARSE)
        kinds = {f.kind for f in report.flags}
        assert GapKind.MISSING_CONTEXT in kinds
        assert GapKind.MISSING_SPECIFICATION in kinds
        assert GapKind.UNCLEAR_INSTRUCTIONS not in kinds

    def test_enriched_clears_flags(self, runtime):
        report = analyze(runtime, fields=RICH)
        kinds = {f.kind for f in report.flags}
        assert GapKind.MISSING_CONTEXT not in kinds
        assert GapKind.MISSING_SPECIFICATION not in kinds

    def test_rich_beats_stripped_probability(self, runtime):
        rich = analyze(runtime, fields=RICH)
        stripped = analyze(
            runtime,
            raw_prompt="My Flask upload endpoint crashes with large files. "
                       "The handler fails after the first request.")
        assert rich.probability_effective > stripped.probability_effective

    def test_misspellings_strictly_lower_clarity(self, runtime):
        base = analyze(runtime, fields=SPARSE)
        typos = SPARSE.description.replace("crashes", "crashs") \
                                  .replace("uploading", "uplaoding") \
                                  .replace("using", "usign")
        worse = analyze(runtime, fields=TemplateFields(description=typos))
        assert worse.scores.clarity < base.scores.clarity

    def test_suggestions_nonempty_when_flagged(self, runtime):
        report = analyze(runtime, fields=SPARSE)
        assert report.flags
        assert report.suggestions

    def test_referential_transparency(self, runtime):
        a = report_to_json(analyze(runtime, fields=RICH))
        b = report_to_json(analyze(runtime, fields=RICH))
        assert a == b

    def test_raw_prompt_composed_passthrough(self, runtime):
        raw = "The build fails on the new machine. It needs a clean cache."
        report = analyze(runtime, raw_prompt=raw)
        assert report.composed_prompt == raw

    def test_probability_in_open_interval(self, runtime):
        report = analyze(runtime, fields=SPARSE)
        assert 0.0 < report.probability_effective < 1.0
