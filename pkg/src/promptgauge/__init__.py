"""promptgauge: knowledge-gap analysis for developer prompts."""

from .advisor import (
    AdvisorRuntime,
    CategoryScores,
    Direction,
    GapFlag,
    GapKind,
    GapReport,
    Suggestion,
    TemplateFields,
    analyze,
    category_scores,
    detect_gaps,
    fields_to_prompt,
    generate_suggestions,
    report_to_dict,
    report_to_json,
)
from .assets import AssetBundle, Lexicons
from .codemetrics import (
    CodeMetrics,
    CodeSnippet,
    ErrorMessage,
    PromptSegments,
    count_code_descriptions,
    count_urls,
    extract_segments,
    reassemble,
    snippet_stats,
)
from .corpus import (
    Conversation,
    CorpusSummary,
    IssueStatus,
    LoadResult,
    StopwordRatioDetector,
    Turn,
    compare_groups,
    corpus_stats,
    detect_english,
    load_corpus,
    serialize_corpus,
)
from .errors import (
    AssetError,
    ContractError,
    CorpusParseError,
    InputError,
    PromptGaugeError,
    TrainingError,
)
from .features import (
    CANONICAL_FEATURES,
    FeatureSelection,
    FeatureVector,
    ScalerParams,
    Scope,
    apply_robust_scaler,
    compute_vif,
    extract_features,
    fit_robust_scaler,
    prune_by_vif,
)
from .model import (
    Attribution,
    ModelParams,
    attribute,
    cross_validate,
    predict_proba,
    train_l1_logistic,
)
from .textmetrics import (
    Sentence,
    TextMetrics,
    compute_text_metrics,
    count_syllables,
    split_sentences,
)
from .tokens import Token, TokenKind, tokenize

__version__ = "0.1.0"
