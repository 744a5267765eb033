import json

import pytest
from fastapi.testclient import TestClient

from promptgauge.service import create_app

FIVE_FIELDS = {
    "fields": {
        "description": "My parser crashes on long files and I need a fix.",
        "code_snippets": ["total = 0;\nvalue = total + 1;"],
        "error_log": "ValueError: line too long",
        "libraries_frameworks": "Python 3.11",
        "resources": "https://docs.example.com/parser",
    }
}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


class TestAnalyzeEndpoint:
    def test_five_field_request_has_scores(self, client):
        resp = client.post("/v1/analyze", json=FIVE_FIELDS)
        assert resp.status_code == 200
        doc = resp.json()
        scores = doc["report"]["scores"]
        assert set(scores) == {"contextual_richness", "specificity", "clarity"}
        for value in scores.values():
            assert 0.0 <= value <= 100.0
        assert "model" in doc["version"] and "assets" in doc["version"]

    def test_raw_prompt_request(self, client):
        resp = client.post("/v1/analyze", json={
            "raw_prompt": "The build fails. It needs a clean cache first."})
        assert resp.status_code == 200

    def test_mutually_exclusive_inputs(self, client):
        body = dict(FIVE_FIELDS)
        body["raw_prompt"] = "also raw"
        resp = client.post("/v1/analyze", json=body)
        assert resp.status_code == 400
        err = resp.json()["error"]
        assert err["code"] == "invalid_request"
        assert "mutually exclusive" in err["message"]

    def test_neither_input(self, client):
        resp = client.post("/v1/analyze", json={})
        assert resp.status_code == 400

    def test_all_empty_fields(self, client):
        resp = client.post("/v1/analyze", json={"fields": {}})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "invalid_request"

    def test_schema_violation_is_400_with_field_path(self, client):
        resp = client.post("/v1/analyze", json={"raw_prompt": 17})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "invalid_request"
        assert "raw_prompt" in resp.json()["error"].get("field", "")

    def test_byte_identical_repeat(self, client):
        a = client.post("/v1/analyze", json=FIVE_FIELDS)
        b = client.post("/v1/analyze", json=FIVE_FIELDS)
        assert a.content == b.content

    def test_thresholds_option(self, client):
        body = {"raw_prompt": "Fix it.",
                "options": {"thresholds": {"clarity": 99.0}}}
        resp = client.post("/v1/analyze", json=body)
        assert resp.status_code == 200
        kinds = [f["kind"] for f in resp.json()["report"]["flags"]]
        assert "UnclearInstructions" in kinds

    def test_composed_prompt_passthrough(self, client):
        resp = client.post("/v1/analyze", json=FIVE_FIELDS)
        composed = resp.json()["report"]["composed_prompt"]
        assert FIVE_FIELDS["fields"]["description"] in composed
        assert "Error output:" in composed

    def test_unknown_model_id_rejected(self, client):
        body = {"raw_prompt": "Fix it please.",
                "options": {"model": "experimental-7"}}
        resp = client.post("/v1/analyze", json=body)
        assert resp.status_code == 400
        assert resp.json()["error"]["field"] == "options.model"


class TestHealthEndpoint:
    def test_ok_with_fingerprints(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["status"] == "ok"
        assert len(doc["model_fingerprint"]) == 16
        assert len(doc["asset_fingerprint"]) == 16
        assert doc["thresholds"]["clarity"] == 50.0

    def test_fingerprint_stable_across_instances(self):
        a = TestClient(create_app()).get("/v1/health").json()
        b = TestClient(create_app()).get("/v1/health").json()
        assert a["model_fingerprint"] == b["model_fingerprint"]
        assert a["asset_fingerprint"] == b["asset_fingerprint"]

    def test_degraded_on_missing_assets(self, tmp_path):
        client = TestClient(create_app(str(tmp_path)))
        doc = client.get("/v1/health").json()
        assert doc["status"] == "degraded"
        assert doc["detail"]
        resp = client.post("/v1/analyze", json={"raw_prompt": "x y z."})
        assert resp.status_code == 503
        assert resp.json()["error"]["code"] == "assets_unavailable"


ANALYZE_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["report", "version"],
    "additionalProperties": False,
    "properties": {
        "report": {
            "type": "object",
            "required": ["scores", "probability_effective", "flags",
                         "attributions", "suggestions", "composed_prompt"],
            "additionalProperties": False,
            "properties": {
                "scores": {
                    "type": "object",
                    "required": ["contextual_richness", "specificity", "clarity"],
                    "additionalProperties": False,
                    "properties": {
                        "contextual_richness": {"type": "number", "minimum": 0, "maximum": 100},
                        "specificity": {"type": "number", "minimum": 0, "maximum": 100},
                        "clarity": {"type": "number", "minimum": 0, "maximum": 100},
                    },
                },
                "probability_effective": {"type": "number",
                                          "exclusiveMinimum": 0,
                                          "exclusiveMaximum": 1},
                "flags": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["kind", "severity", "evidence"],
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"enum": ["MissingContext", "MultipleContext",
                                              "UnclearInstructions",
                                              "MissingSpecification"]},
                            "severity": {"type": "number", "minimum": 0, "maximum": 1},
                            "evidence": {"type": "array", "items": {"type": "string"}},
                        },
                    },
                },
                "attributions": {
                    "type": "object",
                    "required": ["intercept", "logit", "probability", "contributions"],
                    "additionalProperties": False,
                    "properties": {
                        "intercept": {"type": "number"},
                        "logit": {"type": "number"},
                        "probability": {"type": "number"},
                        "contributions": {
                            "type": "object",
                            "additionalProperties": {"type": "number"},
                        },
                    },
                },
                "suggestions": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["text", "target_feature", "expected_direction"],
                        "additionalProperties": False,
                        "properties": {
                            "text": {"type": "string"},
                            "target_feature": {"type": "string"},
                            "expected_direction": {"enum": ["increase", "decrease"]},
                        },
                    },
                },
                "composed_prompt": {"type": "string"},
            },
        },
        "version": {
            "type": "object",
            "additionalProperties": {"type": "string"},
        },
    },
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["error"],
    "additionalProperties": False,
    "properties": {
        "error": {
            "type": "object",
            "required": ["code", "message"],
            "additionalProperties": False,
            "properties": {
                "code": {"type": "string"},
                "message": {"type": "string"},
                "field": {"type": "string"},
            },
        },
    },
}


class TestResponseSchemas:
    def test_analyze_bodies_validate(self, client):
        import jsonschema

        for body in (FIVE_FIELDS,
                     {"raw_prompt": "The build fails. It never recovers."}):
            doc = client.post("/v1/analyze", json=body).json()
            jsonschema.validate(doc, ANALYZE_RESPONSE_SCHEMA)

    def test_error_bodies_validate(self, client):
        import jsonschema

        for body in ({}, {"raw_prompt": 5},
                     {"raw_prompt": "x", "fields": {"description": "y"}}):
            resp = client.post("/v1/analyze", json=body)
            assert resp.status_code == 400
            jsonschema.validate(resp.json(), ERROR_SCHEMA)

    def test_internal_error_is_generic_with_correlation_id(self):
        app = create_app()

        class Broken:
            def __getattr__(self, name):
                raise RuntimeError("secret internal detail")

        app.state.runtime = Broken()
        client = TestClient(app, raise_server_exceptions=False)
        resp = client.post("/v1/analyze", json={"raw_prompt": "x y."})
        assert resp.status_code == 500
        err = resp.json()["error"]
        assert err["code"] == "internal"
        assert "secret" not in err["message"]
        assert "correlation id" in err["message"]

        import jsonschema

        jsonschema.validate(resp.json(), ERROR_SCHEMA)


class TestStatelessness:
    def test_many_identical_requests_identical_bodies(self, client):
        bodies = {client.post("/v1/analyze", json=FIVE_FIELDS).content
                  for _ in range(5)}
        assert len(bodies) == 1

    def test_interleaved_requests_do_not_interfere(self, client):
        a1 = client.post("/v1/analyze", json=FIVE_FIELDS).content
        client.post("/v1/analyze", json={"raw_prompt": "Other prompt here."})
        a2 = client.post("/v1/analyze", json=FIVE_FIELDS).content
        assert a1 == a2

    def test_concurrent_identical_requests(self):
        import concurrent.futures

        app = create_app()

        def worker(_):
            local = TestClient(app)
            return local.post("/v1/analyze", json=FIVE_FIELDS).content

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            bodies = set(pool.map(worker, range(24)))
        assert len(bodies) == 1
