"""HTTP service exposing the analyzer on a versioned local API.

POST /v1/analyze takes either the five template fields or a raw prompt
(mutually exclusive) and returns the GapReport plus asset/model
fingerprints. The body is produced by the same canonical serializer the
CLI uses, so both surfaces are byte-identical for identical inputs.
"""

from __future__ import annotations

import json
import uuid

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .advisor import (
    AdvisorRuntime,
    DEFAULT_THRESHOLD,
    TemplateFields,
    analyze,
    report_to_dict,
)
from .assets import AssetBundle, asset_fingerprint, model_fingerprint, resolve_asset_dir
from .errors import AssetError, InputError

API_PREFIX = "/v1"
DEFAULT_PORT = 8571


class TemplateFieldsIn(BaseModel):
    description: str = ""
    code_snippets: list[str] = Field(default_factory=list)
    error_log: str = ""
    libraries_frameworks: str = ""
    resources: str = ""


class AnalyzeOptions(BaseModel):
    thresholds: dict[str, float] = Field(default_factory=dict)
    model: str = "default"


class AnalyzeRequest(BaseModel):
    fields: TemplateFieldsIn | None = None
    raw_prompt: str | None = None
    options: AnalyzeOptions = Field(default_factory=AnalyzeOptions)


class ScoresOut(BaseModel):
    contextual_richness: float
    specificity: float
    clarity: float


class FlagOut(BaseModel):
    kind: str
    severity: float
    evidence: list[str]


class SuggestionOut(BaseModel):
    text: str
    target_feature: str
    expected_direction: str


class AttributionOut(BaseModel):
    intercept: float
    logit: float
    probability: float
    contributions: dict[str, float]


class ReportOut(BaseModel):
    scores: ScoresOut
    probability_effective: float
    flags: list[FlagOut]
    attributions: AttributionOut
    suggestions: list[SuggestionOut]
    composed_prompt: str


class AnalyzeResponse(BaseModel):
    report: ReportOut
    version: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    model_fingerprint: str
    asset_fingerprint: str
    thresholds: dict[str, float]
    detail: str = ""


def canonical_response_json(doc: dict) -> str:
    """The byte-exact wire format shared by the CLI and the service."""
    return json.dumps(doc, indent=2, ensure_ascii=False)


def build_analyze_document(
    runtime: AdvisorRuntime,
    fields: TemplateFields | None,
    raw_prompt: str | None,
    thresholds: dict[str, float] | None,
) -> dict:
    report = analyze(runtime, fields=fields, raw_prompt=raw_prompt,
                     thresholds=thresholds)
    return {
        "report": report_to_dict(report),
        "version": runtime.assets.fingerprints(),
    }


def _error_body(code: str, message: str, field_path: str = "") -> dict:
    body = {"error": {"code": code, "message": message}}
    if field_path:
        body["error"]["field"] = field_path
    return body


def create_app(asset_dir: str | None = None, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="promptgauge", version="1.0")
    app.state.asset_dir = resolve_asset_dir(asset_dir)
    app.state.runtime = None
    app.state.asset_error = ""
    try:
        bundle = AssetBundle.load(app.state.asset_dir)
        app.state.runtime = AdvisorRuntime.from_assets(bundle)
    except AssetError as exc:
        app.state.asset_error = str(exc)

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        path = ".".join(str(p) for p in first.get("loc", []) if p != "body")
        return Response(
            content=canonical_response_json(
                _error_body("invalid_request", first.get("msg", "invalid request"), path)
            ),
            status_code=400,
            media_type="application/json",
        )

    @app.exception_handler(Exception)
    async def on_internal_error(request: Request, exc: Exception):
        correlation = uuid.uuid4().hex
        return Response(
            content=canonical_response_json(
                _error_body("internal", f"internal error; correlation id {correlation}")
            ),
            status_code=500,
            media_type="application/json",
        )

    @app.post(f"{API_PREFIX}/analyze", response_model=AnalyzeResponse)
    async def handle_analyze(request: AnalyzeRequest) -> Response:
        if app.state.runtime is None:
            return Response(
                content=canonical_response_json(
                    _error_body("assets_unavailable", app.state.asset_error)),
                status_code=503,
                media_type="application/json",
            )
        if request.options.model not in ("", "default"):
            return Response(
                content=canonical_response_json(_error_body(
                    "invalid_request",
                    f"unknown model id: {request.options.model}",
                    "options.model")),
                status_code=400,
                media_type="application/json",
            )
        has_fields = request.fields is not None
        has_raw = request.raw_prompt is not None
        if has_fields == has_raw:
            return Response(
                content=canonical_response_json(_error_body(
                    "invalid_request",
                    "fields and raw_prompt are mutually exclusive; provide exactly one",
                    "fields")),
                status_code=400,
                media_type="application/json",
            )
        fields = None
        if has_fields:
            fields = TemplateFields(
                description=request.fields.description,
                code_snippets=tuple(request.fields.code_snippets),
                error_log=request.fields.error_log,
                libraries_frameworks=request.fields.libraries_frameworks,
                resources=request.fields.resources,
            )
        try:
            doc = build_analyze_document(
                app.state.runtime, fields, request.raw_prompt,
                request.options.thresholds or None,
            )
        except InputError as exc:
            return Response(
                content=canonical_response_json(
                    _error_body("invalid_request", str(exc))),
                status_code=400,
                media_type="application/json",
            )
        return Response(
            content=canonical_response_json(doc),
            media_type="application/json",
        )

    @app.get(f"{API_PREFIX}/health", response_model=HealthResponse)
    async def handle_health():
        degraded = app.state.runtime is None
        return HealthResponse(
            status="degraded" if degraded else "ok",
            model_fingerprint=model_fingerprint(app.state.asset_dir),
            asset_fingerprint=asset_fingerprint(app.state.asset_dir),
            thresholds={
                "contextual_richness": DEFAULT_THRESHOLD,
                "specificity": DEFAULT_THRESHOLD,
                "clarity": DEFAULT_THRESHOLD,
            },
            detail=app.state.asset_error,
        )

    return app
