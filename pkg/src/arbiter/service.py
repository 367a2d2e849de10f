"""Decision-as-a-service HTTP API.

Two core endpoints per application, plus registration and listing:

* ``GET  /applications`` - registered applications.
* ``PUT  /applications/{id}`` - register or replace an application.
* ``GET  /applications/{id}`` - record info including compiled source.
* ``GET  /applications/{id}/metadata`` - option ids and scenario elements.
* ``POST /applications/{id}/query`` - acceptable options for a context.

Unknown applications answer 404; contexts naming unknown scenario elements
answer 422 with the same diagnostic structure the CLI prints.  Responses
are deterministic for a fixed application revision.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .engine import decide, decide_with_abduction
from .errors import ArbiterError, Diagnostic
from .explain import explanation_to_json
from .grounding import QueryContext
from .policy import ApplicationMetadata
from .registry import ApplicationRecord, Registry, default_registry_path


class RegisterBody(BaseModel):
    source: str
    kind: str = Field(pattern="^(sbp|grg)$")
    mode: str = Field(default="basic", pattern="^(basic|advanced)$")
    name: Optional[str] = None


class QueryBody(BaseModel):
    facts: list[str] = Field(default_factory=list)
    bindings: dict[str, Any] = Field(default_factory=dict)
    abduce_for: Optional[str] = None


def diagnostic_payload(diagnostics) -> list[dict]:
    return [
        {"severity": d.severity, "code": d.code, "message": d.message, "labels": list(d.labels)}
        for d in diagnostics
    ]


def _error_diagnostic(exc: Exception) -> Diagnostic:
    code = type(exc).__name__.removesuffix("Error").lower() or "error"
    return Diagnostic("error", code, str(exc))


def validate_context(body: QueryBody, metadata: ApplicationMetadata) -> list[Diagnostic]:
    """Reject unknown scenario-element ids instead of ignoring them."""
    known = {e.id: e.kind for e in metadata.scenario_elements}
    findings = []
    for fact in body.facts:
        if known.get(fact) != "propositional":
            findings.append(
                Diagnostic("error", "unknown-scenario-element", f"unknown fact id {fact!r}")
            )
    for name, value in body.bindings.items():
        if known.get(name) != "numeric":
            findings.append(
                Diagnostic("error", "unknown-scenario-element", f"unknown binding {name!r}")
            )
            continue
        values = value if isinstance(value, list) else [value]
        for item in values:
            try:
                QueryContext.make(bindings={name: item})
            except Exception:
                findings.append(
                    Diagnostic("error", "invalid-binding", f"binding {name!r}={item!r} is not numeric")
                )
    if body.abduce_for is not None and body.abduce_for not in metadata.options:
        findings.append(
            Diagnostic("error", "unknown-option", f"unknown option {body.abduce_for!r}")
        )
    return findings


def execute_query(record: ApplicationRecord, body: QueryBody) -> tuple:
    """Run a validated query; returns (DecisionResult, response payload)."""
    ctx = QueryContext.make(facts=body.facts, bindings=body.bindings)
    result = decide(record.theory, ctx)
    response = {
        "acceptable_options": list(result.acceptable_options),
        "ambiguous": result.ambiguous,
        "explanations": {
            option: [explanation_to_json(e) for e in explanations]
            for option, explanations in sorted(result.per_option.items())
        },
        "assumptions": [],
    }
    if body.abduce_for is not None:
        response["assumptions"] = [
            {
                "assumptions": sorted(str(a) for a in assumption_set),
                "explanation": explanation_to_json(explanation),
            }
            for assumption_set, explanation in decide_with_abduction(
                record.theory, ctx, body.abduce_for
            )
        ]
    return result, response


def create_app(registry=None) -> FastAPI:
    """Build the service around a registry directory (default: $ARBITER_REGISTRY)."""
    if registry is None:
        registry = default_registry_path()
    if not isinstance(registry, Registry):
        registry = Registry(registry)

    app = FastAPI(title="arbiter decision service", version="0.1.0")
    app.state.registry = registry

    def load(app_id: str) -> ApplicationRecord:
        try:
            return registry.load(app_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown application {app_id!r}")

    @app.get("/applications")
    def list_applications() -> list[dict]:
        return registry.list()

    @app.put("/applications/{app_id}")
    def register_application(app_id: str, body: RegisterBody) -> dict:
        try:
            record = registry.register(
                app_id, body.source, body.kind, mode=body.mode, name=body.name
            )
        except (ArbiterError, ValueError) as exc:
            raise HTTPException(
                status_code=422, detail=diagnostic_payload([_error_diagnostic(exc)])
            )
        return {**record.info(), "metadata": record.metadata.to_json()}

    @app.get("/applications/{app_id}")
    def application_info(app_id: str) -> dict:
        record = load(app_id)
        from .language import render_theory

        return {
            **record.info(),
            "metadata": record.metadata.to_json(),
            "source": {"original": record.source, "compiled": render_theory(record.theory)},
        }

    @app.get("/applications/{app_id}/metadata")
    def application_metadata(app_id: str) -> dict:
        return load(app_id).metadata.to_json()

    @app.post("/applications/{app_id}/query")
    def query_application(app_id: str, body: QueryBody) -> dict:
        record = load(app_id)
        findings = validate_context(body, record.metadata)
        if findings:
            raise HTTPException(status_code=422, detail=diagnostic_payload(findings))
        _, response = execute_query(record, body)
        return response

    return app
