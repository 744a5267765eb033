"""Command-line interface.

Thin layer over the core package; `analyze --json` emits exactly the
bytes the HTTP service returns for the same input. Exit codes: 0 ok,
2 input error, 3 asset error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .advisor import AdvisorRuntime, TemplateFields
from .assets import AssetBundle
from .corpus import (
    SCHEMA_MINIMAL,
    StopwordRatioDetector,
    compare_groups,
    corpus_stats,
    load_corpus,
    with_language_flag,
)
from .errors import AssetError, InputError, PromptGaugeError
from .features import (
    CANONICAL_FEATURES,
    Scope,
    extract_features,
    fit_robust_scaler,
    prune_by_vif,
    read_feature_csv,
    scaler_to_doc,
    write_feature_csv,
)
from .model import (
    DEFAULT_L1_STRENGTH,
    cross_validate,
    model_from_doc,
    model_to_json,
    predict_proba,
    train_l1_logistic,
)
from .service import build_analyze_document, canonical_response_json

EXIT_INPUT_ERROR = 2
EXIT_ASSET_ERROR = 3


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_bundle(assets: str | None) -> AssetBundle:
    try:
        return AssetBundle.load(assets)
    except AssetError as exc:
        _fail(str(exc), EXIT_ASSET_ERROR)


@click.group()
def main():
    """Prompt knowledge-gap analyzer."""


@main.command()
@click.option("--file", "file_", type=click.Path(exists=True, dir_okay=False),
              help="Read a raw draft prompt from a file.")
@click.option("--stdin", "use_stdin", is_flag=True,
              help="Read a raw draft prompt from stdin.")
@click.option("--description", default=None)
@click.option("--code", "code_snippets", multiple=True,
              help="Code snippet (repeatable).")
@click.option("--error-log", default=None)
@click.option("--libs", default=None, help="Libraries/frameworks line.")
@click.option("--resources", default=None, help="Reference links/resources.")
@click.option("--json", "as_json", is_flag=True, help="Canonical JSON output.")
@click.option("--pretty", is_flag=True, help="Human-readable output (default).")
@click.option("--assets", default=None, help="Asset directory override.")
def analyze(file_, use_stdin, description, code_snippets, error_log, libs,
            resources, as_json, pretty, assets):
    """Analyze a draft prompt or a five-field template."""
    raw_sources = sum(1 for flag in (file_, use_stdin) if flag)
    field_flags = [description, error_log, libs, resources]
    has_fields = any(v is not None for v in field_flags) or bool(code_snippets)
    if raw_sources > 1 or (raw_sources and has_fields):
        _fail("use exactly one input: --file, --stdin, or template fields",
              EXIT_INPUT_ERROR)
    if not raw_sources and not has_fields:
        _fail("no input; pass --file, --stdin, or template fields",
              EXIT_INPUT_ERROR)

    raw_prompt = None
    fields = None
    if file_:
        raw_prompt = Path(file_).read_text(encoding="utf-8")
    elif use_stdin:
        raw_prompt = sys.stdin.read()
    else:
        fields = TemplateFields(
            description=description or "",
            code_snippets=tuple(code_snippets),
            error_log=error_log or "",
            libraries_frameworks=libs or "",
            resources=resources or "",
        )

    bundle = _load_bundle(assets)
    try:
        runtime = AdvisorRuntime.from_assets(bundle)
    except AssetError as exc:
        _fail(str(exc), EXIT_ASSET_ERROR)
    try:
        doc = build_analyze_document(runtime, fields, raw_prompt, None)
    except InputError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)

    if as_json and not pretty:
        sys.stdout.write(canonical_response_json(doc))
        return
    report = doc["report"]
    scores = report["scores"]
    click.echo("Category scores")
    click.echo(f"  contextual richness  {scores['contextual_richness']:6.2f}")
    click.echo(f"  specificity          {scores['specificity']:6.2f}")
    click.echo(f"  clarity              {scores['clarity']:6.2f}")
    click.echo(f"  p(effective)         {report['probability_effective']:6.3f}")
    if report["flags"]:
        click.echo("Gaps")
        for f in report["flags"]:
            click.echo(f"  {f['kind']} (severity {f['severity']:.2f}; "
                       f"evidence: {', '.join(f['evidence'])})")
    else:
        click.echo("Gaps: none")
    if report["suggestions"]:
        click.echo("Suggestions")
        for s in report["suggestions"]:
            click.echo(f"  [{s['expected_direction']}] {s['target_feature']}: {s['text']}")


@main.command()
@click.option("--port", default=8571, show_default=True)
@click.option("--assets", default=None, help="Asset directory override.")
@click.option("--listen", is_flag=True,
              help="Bind 0.0.0.0 instead of loopback (no auth; LAN-visible).")
@click.option("--cors-origin", multiple=True,
              help="Allowed browser origin (repeatable).")
def serve(port, assets, listen, cors_origin):
    """Run the local analyzer service."""
    import uvicorn

    from .service import create_app

    host = "0.0.0.0" if listen else "127.0.0.1"
    if listen:
        click.echo("warning: --listen exposes the service to the network "
                   "without authentication", err=True)
    app = create_app(assets, list(cors_origin) or ["*"])
    uvicorn.run(app, host=host, port=port)


@main.group()
def corpus():
    """Corpus loading, statistics and group comparison."""


def _load_conversations(path: str, schema: str, assets: str | None):
    bundle = _load_bundle(assets)
    try:
        result = load_corpus(Path(path).read_bytes(), schema)
    except PromptGaugeError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    for notice in result.notices:
        click.echo(f"notice: {notice.kind} {notice.record_id}: {notice.detail}",
                   err=True)
    detector = StopwordRatioDetector(bundle.lexicons.stopwords)
    conversations = [with_language_flag(c, detector) for c in result.conversations]
    dropped = sum(1 for c in conversations if not c.language_ok)
    if dropped:
        click.echo(f"notice: {dropped} conversations flagged non-English", err=True)
    return bundle, conversations


@corpus.command("stats")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", default=SCHEMA_MINIMAL, show_default=True)
@click.option("--group-by", default="status", type=click.Choice(["status"]))
@click.option("--out", default="json", type=click.Choice(["json", "csv"]))
@click.option("--assets", default=None)
def corpus_stats_cmd(path, schema, group_by, out, assets):
    """Per-group min/median/max of the 24 metrics."""
    bundle, conversations = _load_conversations(path, schema, assets)
    features = [extract_features(c, bundle, Scope.CONVERSATION).values
                for c in conversations]
    summary = corpus_stats(conversations, features)
    if out == "json":
        doc = {
            "n_conversations": summary.n_conversations,
            "n_open": summary.n_open,
            "n_closed": summary.n_closed,
            "prompts_open": summary.prompts_open,
            "prompts_closed": summary.prompts_closed,
            "metrics": {
                name: {
                    group: (None if stats is None else
                            {"min": stats.minimum, "median": stats.median,
                             "max": stats.maximum})
                    for group, stats in (
                        ("open", summary.metrics_open.get(name)),
                        ("closed", summary.metrics_closed.get(name)),
                    )
                }
                for name in CANONICAL_FEATURES
            },
        }
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo("metric,group,min,median,max")
        for name in CANONICAL_FEATURES:
            for group, stats in (("open", summary.metrics_open.get(name)),
                                 ("closed", summary.metrics_closed.get(name))):
                if stats is None:
                    click.echo(f"{name},{group},,,")
                else:
                    click.echo(f"{name},{group},{stats.minimum},"
                               f"{stats.median},{stats.maximum}")


@corpus.command("ttest")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", default=SCHEMA_MINIMAL, show_default=True)
@click.option("--assets", default=None)
def corpus_ttest_cmd(path, schema, assets):
    """Welch t-test p-values per metric between open and closed groups."""
    bundle, conversations = _load_conversations(path, schema, assets)
    rows = [(c, extract_features(c, bundle, Scope.CONVERSATION).values)
            for c in conversations if c.language_ok]
    open_rows = [f for c, f in rows if c.issue_status.value == "open"]
    closed_rows = [f for c, f in rows if c.issue_status.value == "closed"]
    try:
        pvalues = compare_groups(open_rows, closed_rows)
    except PromptGaugeError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    click.echo(json.dumps({k: pvalues[k] for k in CANONICAL_FEATURES}, indent=2))


@corpus.command("extract")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", default=SCHEMA_MINIMAL, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.option("--assets", default=None)
def corpus_extract_cmd(path, schema, output, assets):
    """Write the per-conversation feature matrix as CSV."""
    bundle, conversations = _load_conversations(path, schema, assets)
    kept = [c for c in conversations if c.language_ok]
    vectors = [extract_features(c, bundle, Scope.CONVERSATION) for c in kept]
    labels = [c.issue_status for c in kept]
    Path(output).write_text(write_feature_csv(vectors, labels), encoding="utf-8")
    click.echo(f"wrote {len(vectors)} rows to {output}")


@main.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--l1", "l1_strength", default=DEFAULT_L1_STRENGTH, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-iterations", default=1000, show_default=True)
@click.option("--no-vif-prune", is_flag=True,
              help="Skip collinearity pruning before the fit.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.option("--scaler-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the fitted robust-scaler parameters.")
def train(features_csv, l1_strength, seed, max_iterations, no_vif_prune,
          output, scaler_out):
    """Fit the gap classifier on a feature CSV (label column: issue_status)."""
    try:
        X, y, names = read_feature_csv(Path(features_csv).read_text(encoding="utf-8"))
        if no_vif_prune:
            retained = names
        else:
            selection = prune_by_vif(X, names)
            retained = list(selection.retained)
            for name in selection.removed:
                click.echo(f"pruned (VIF>5): {name}", err=True)
        idx = [names.index(n) for n in retained]
        scaler = fit_robust_scaler(X[:, idx], retained)
        from .features import apply_robust_scaler_matrix

        Xs = apply_robust_scaler_matrix(scaler, X[:, idx])
        params = train_l1_logistic(
            Xs, y, retained, l1_strength=l1_strength,
            max_iterations=max_iterations, seed=seed,
            trained_on=f"{Path(features_csv).name} (n={X.shape[0]}, seed={seed})",
        )
    except PromptGaugeError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    Path(output).write_text(model_to_json(params) + "\n", encoding="utf-8")
    if scaler_out:
        Path(scaler_out).write_text(
            json.dumps(scaler_to_doc(scaler), indent=2) + "\n", encoding="utf-8")
    if not params.converged:
        click.echo("warning: did not converge within iteration budget", err=True)
    nonzero = sum(1 for w in params.weights if w != 0.0)
    click.echo(f"trained on {X.shape[0]} rows; {nonzero}/{len(params.weights)} "
               f"non-zero weights; model written to {output}")


@main.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--cv", default=0, help="Cross-validation folds (0 = plain accuracy).")
@click.option("--seed", default=0, show_default=True)
def evaluate(features_csv, model_path, cv, seed):
    """Evaluate a model file against a feature CSV."""
    try:
        X, y, names = read_feature_csv(Path(features_csv).read_text(encoding="utf-8"))
        doc = json.loads(Path(model_path).read_text(encoding="utf-8"))
        params = model_from_doc(doc)
        idx = [names.index(n) for n in params.feature_names]
    except (PromptGaugeError, ValueError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    sub = X[:, idx]
    try:
        if cv:
            result = cross_validate(sub, y, list(params.feature_names), k=cv,
                                    l1_strength=params.l1_strength, seed=seed)
            click.echo(json.dumps(result, indent=2))
            return
        scaler = fit_robust_scaler(sub, list(params.feature_names))
        from .features import apply_robust_scaler_matrix

        Xs = apply_robust_scaler_matrix(scaler, sub)
        preds = [1.0 if predict_proba(params, row) >= 0.5 else 0.0 for row in Xs]
        accuracy = sum(1 for p, t in zip(preds, y) if p == t) / len(y)
        click.echo(json.dumps({"accuracy": accuracy, "n": int(len(y))}, indent=2))
    except PromptGaugeError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
