"""HTTP layer over the project store.

Routes (JSON in, JSON out; payloads mirror the interchange records):

    POST /projects
    GET  /projects/{id}
    GET  /projects/{id}/next?annotator=A           (bearer auth)
    PUT  /projects/{id}/segments/{sid}/annotations?annotator=A  (bearer auth)
    GET  /projects/{id}/export
    GET  /projects/{id}/progress
    GET  /taxonomies/{name}

Error mapping: validation 400, missing things 404, bad token 403,
version or idempotency conflicts 409 (carrying the current state).
"""

from __future__ import annotations

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import ValidationError
from .store import AuthError, ConflictError, NotFoundError, ProjectStore


def _bearer(header_value: str | None) -> str | None:
    if header_value and header_value.lower().startswith("bearer "):
        return header_value[7:].strip()
    return None


def create_app(store: ProjectStore) -> FastAPI:
    app = FastAPI(title="lqm annotation server", docs_url=None, redoc_url=None)
    app.state.store = store
    # the browser UI is served from its own origin; tokens ride in the
    # Authorization header, so wildcard origins stay credential-free
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ValidationError)
    async def _validation_error(request: Request, exc: ValidationError):
        status = 400
        body = {"error": str(exc)}
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, AuthError):
            status = 403
        elif isinstance(exc, ConflictError):
            status = 409
            body["current"] = exc.current
        return JSONResponse(status_code=status, content=body)

    @app.post("/projects")
    async def create_project(payload: dict = Body(...)):
        project_id, created = store.create_project(payload)
        info = store.project_info(project_id)
        return JSONResponse(status_code=201 if created else 200, content=info)

    @app.get("/projects/{project_id}")
    async def project_info(project_id: str):
        return store.project_info(project_id)

    @app.get("/projects/{project_id}/next")
    async def next_segment(project_id: str,
                           annotator: str = Query(...),
                           authorization: str | None = Header(default=None)):
        store.authorize(project_id, annotator, _bearer(authorization))
        return store.next_segment(project_id, annotator)

    @app.put("/projects/{project_id}/segments/{segment_id}/annotations")
    async def save_annotation(project_id: str, segment_id: str,
                              annotator: str = Query(...),
                              payload: dict = Body(...),
                              authorization: str | None = Header(default=None)):
        store.authorize(project_id, annotator, _bearer(authorization))
        expected = payload.get("expected_version")
        if not isinstance(expected, int):
            raise ValidationError("expected_version (integer) is required")
        spans = payload.get("spans", [])
        if not isinstance(spans, list):
            raise ValidationError("spans must be an array of span records")
        note = payload.get("note")
        version = store.save_annotation(
            project_id, segment_id, annotator, spans,
            None if note is None else str(note), expected)
        return {"version": version}

    @app.get("/projects/{project_id}/export")
    async def export_project(project_id: str):
        segments_jsonl, annotations_jsonl = store.export_project(project_id)
        return {"segments_jsonl": segments_jsonl,
                "annotations_jsonl": annotations_jsonl}

    @app.get("/projects/{project_id}/progress")
    async def progress(project_id: str):
        return store.progress(project_id)

    @app.get("/taxonomies/{name}")
    async def taxonomy(name: str):
        return store.resolve_taxonomy(name).to_dict()

    return app
