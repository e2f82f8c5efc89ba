"""The HTTP API.

All request/response bodies are JSON except schema upload (raw schema text)
and XML export. Errors use one envelope: ``{"code", "message", "details"}``
with 401 unauthenticated, 403 unauthorized, 404 unknown resource, 409
conflict, 422 domain violation.

Role enforcement follows the nested-rights table exactly; on top of it,
annotation, validation, and graph editing are scoped to the caller's own
assignment, while editors and admins may additionally *view* any
annotator's work and agreement figures.
"""

from __future__ import annotations

import os
from typing import Any

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import xmlio
from ..core import (
    Assignment,
    AssignmentStatus,
    AnnotationSet,
    Document,
    Role,
    User,
    authorize,
    reset_after_edit,
    transition,
)
from ..errors import SenTagError
from ..graph import ArgumentGraph
from ..schema import TagSet, validate_spans
from ..server import Config
from .auth import verify_password
from .store import Store


class ApiError(Exception):
    """HTTP-level failure, mapped straight onto the error envelope."""

    def __init__(self, status: int, code: str, message: str, **details: Any):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


def _envelope(code: str, message: str, details: dict) -> dict:
    return {"code": code, "message": message, "details": details}


# --- request bodies ---

class LoginBody(BaseModel):
    username: str
    password: str


class CreateUserBody(BaseModel):
    username: str
    password: str
    role: str


class CreateDocumentBody(BaseModel):
    title: str
    text: str


class BindSchemaBody(BaseModel):
    schema_id: str


class AnnotatorsBody(BaseModel):
    annotator_ids: list[str]


class SpanBody(BaseModel):
    id: str | None = None
    tag: str
    start: int
    end: int
    attributes: dict[str, str] = Field(default_factory=dict)


class AnnotationsBody(BaseModel):
    spans: list[SpanBody]


class StatusBody(BaseModel):
    status: str


class EdgeBody(BaseModel):
    src: str
    dst: str


class GraphBody(BaseModel):
    edges: list[EdgeBody]


# --- serialization helpers ---

def _user_payload(user: User) -> dict:
    return {"id": user.id, "username": user.username, "role": user.role.value}


def _span_payload(span) -> dict:
    return {
        "id": span.id,
        "tag": span.tag,
        "start": span.start,
        "end": span.end,
        "attributes": span.attributes,
    }


def _set_payload(annotation_set: AnnotationSet) -> dict:
    return {
        "document_id": annotation_set.document_id,
        "annotator_id": annotation_set.annotator_id,
        "spans": [_span_payload(s) for s in annotation_set],
    }


def _assignment_payload(assignment: Assignment, document: Document | None) -> dict:
    return {
        "document_id": assignment.document_id,
        "title": document.title if document else None,
        "status": assignment.status.value,
        "last_modified": assignment.last_modified,
    }


def _tagset_payload(tagset: TagSet) -> dict:
    return {
        "schema_id": tagset.schema_id,
        "tags": [
            {
                "name": decl.name,
                "is_graph": decl.is_graph,
                "color_index": decl.color_index,
                "attributes": [
                    {
                        "name": attr.name,
                        "required": attr.required,
                        "enumeration": sorted(attr.enumeration)
                        if attr.enumeration
                        else None,
                        "default": attr.default,
                    }
                    for attr in decl.attributes.values()
                ],
            }
            for decl in sorted(tagset.tags.values(), key=lambda d: d.color_index)
        ],
        "root_allowed": sorted(tagset.root_allowed),
    }


def create_app(store: Store, config: Config | None = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="sentag", docs_url=None, redoc_url=None)

    # --- error envelope ---

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content=_envelope(exc.code, exc.message, exc.details),
        )

    @app.exception_handler(SenTagError)
    async def handle_domain_error(request: Request, exc: SenTagError):
        # Domain violations surface as 422 unless a handler upgraded them.
        return JSONResponse(
            status_code=422,
            content=_envelope(exc.code, exc.message, exc.details),
        )

    @app.exception_handler(RequestValidationError)
    async def handle_request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=_envelope(
                "InvalidRequest", "request body failed validation",
                {"errors": exc.errors()},
            ),
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(request: Request, exc: StarletteHTTPException):
        # unknown routes, bad methods, and anything else the framework raises
        codes = {404: "NotFound", 405: "MethodNotAllowed"}
        return JSONResponse(
            status_code=exc.status_code,
            content=_envelope(
                codes.get(exc.status_code, "HttpError"), str(exc.detail), {}
            ),
        )

    # --- auth plumbing ---

    def current_user(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise ApiError(401, "Unauthenticated", "missing bearer token")
        user = store.user_for_token(header[7:].strip())
        if user is None:
            raise ApiError(401, "Unauthenticated", "invalid or expired token")
        return user

    def require(user: User, action: str) -> None:
        if not authorize(user.role, action):
            raise ApiError(
                403, "Forbidden",
                f"role {user.role.value!r} may not {action}", action=action,
            )

    def get_document_or_404(doc_id: str) -> Document:
        document = store.get_document(doc_id)
        if document is None:
            raise ApiError(404, "NotFound", f"no document {doc_id!r}")
        return document

    def get_assignment_or_404(doc_id: str, annotator_id: str) -> Assignment:
        assignment = store.get_assignment(doc_id, annotator_id)
        if assignment is None:
            raise ApiError(
                404, "NotFound",
                f"user {annotator_id!r} is not assigned to document {doc_id!r}",
            )
        return assignment

    def resolve_annotator(user: User, requested: str | None) -> str:
        """Own work by default; someone else's only for editors and admins."""
        if requested is None or requested == user.id:
            return user.id
        if user.role is Role.ANNOTATOR:
            raise ApiError(
                403, "Forbidden", "annotators may only access their own work"
            )
        return requested

    def tagset_for(document: Document) -> TagSet:
        if document.schema_id is None:
            raise ApiError(
                409, "NoSchema", f"document {document.id!r} has no schema bound"
            )
        tagset = store.get_tagset(document.schema_id)
        if tagset is None:
            raise ApiError(404, "NotFound", f"no schema {document.schema_id!r}")
        return tagset

    def load_synced_graph(
        document: Document, annotation_set: AnnotationSet, tagset: TagSet
    ) -> ArgumentGraph:
        graph = store.load_graph(document.id, annotation_set.annotator_id)
        before = set(graph.edges)
        graph.sync_nodes(annotation_set, tagset)
        if graph.edges != before:
            store.save_graph(graph)
        return graph

    # --- endpoints ---

    @app.post("/api/login")
    def login(body: LoginBody) -> dict:
        user = store.get_user_by_username(body.username)
        if user is None or not verify_password(body.password, user.credential_hash):
            raise ApiError(401, "Unauthenticated", "bad username or password")
        token = store.create_session(user.id, config.session_ttl)
        return {"token": token, "user": _user_payload(user)}

    @app.get("/api/me")
    def me(user: User = Depends(current_user)) -> dict:
        return _user_payload(user)

    @app.post("/api/users", status_code=201)
    def create_user(body: CreateUserBody, user: User = Depends(current_user)) -> dict:
        require(user, "create_user")
        try:
            role = Role(body.role)
        except ValueError:
            raise ApiError(422, "InvalidRole", f"unknown role {body.role!r}")
        try:
            created = store.create_user(body.username, body.password, role)
        except SenTagError as exc:
            raise ApiError(409, exc.code, exc.message, **exc.details)
        return _user_payload(created)

    @app.get("/api/users")
    def list_users(user: User = Depends(current_user)) -> list:
        require(user, "create_user")
        return [_user_payload(u) for u in store.list_users()]

    @app.get("/api/annotators")
    def list_annotators(user: User = Depends(current_user)) -> list:
        # assignment UI needs names to assign; full user management stays admin-only
        require(user, "assign")
        return [_user_payload(u) for u in store.list_users()]

    @app.post("/api/schemas", status_code=201)
    async def upload_schema(request: Request, user: User = Depends(current_user)) -> dict:
        require(user, "upload_schema")
        raw = await request.body()
        try:
            schema_text = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(422, "InvalidEncoding", "schema text must be UTF-8")
        tagset = store.add_schema(schema_text, created_by=user.id)
        return _tagset_payload(tagset)

    @app.get("/api/schemas")
    def list_schemas(user: User = Depends(current_user)) -> list:
        require(user, "upload_schema")
        return [_tagset_payload(t) for t in store.list_schemas()]

    @app.post("/api/documents", status_code=201)
    def create_document(
        body: CreateDocumentBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "upload_document")
        try:
            document = store.add_document(body.title, body.text, created_by=user.id)
        except ValueError as exc:
            raise ApiError(422, "InvalidDocumentText", str(exc))
        return {"id": document.id, "title": document.title}

    @app.get("/api/documents")
    def list_documents(user: User = Depends(current_user)) -> list:
        require(user, "assign")
        out = []
        for document in store.list_documents():
            assignments = store.list_assignments_for_document(document.id)
            out.append({
                "id": document.id,
                "title": document.title,
                "schema_id": document.schema_id,
                "annotators": [
                    {
                        "annotator_id": a.annotator_id,
                        "status": a.status.value,
                    }
                    for a in assignments
                ],
            })
        return out

    @app.get("/api/documents/{doc_id}")
    def get_document(doc_id: str, user: User = Depends(current_user)) -> dict:
        document = get_document_or_404(doc_id)
        assignment = store.get_assignment(doc_id, user.id)
        if assignment is None and user.role is Role.ANNOTATOR:
            raise ApiError(
                404, "NotFound",
                f"user {user.id!r} is not assigned to document {doc_id!r}",
            )
        tagset = (
            store.get_tagset(document.schema_id) if document.schema_id else None
        )
        return {
            "id": document.id,
            "title": document.title,
            "text": document.text,
            "schema_id": document.schema_id,
            "tagset": _tagset_payload(tagset) if tagset else None,
            "status": assignment.status.value if assignment else None,
        }

    @app.put("/api/documents/{doc_id}/schema")
    def bind_schema(
        doc_id: str, body: BindSchemaBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "assign")
        get_document_or_404(doc_id)
        if store.get_tagset(body.schema_id) is None:
            raise ApiError(404, "NotFound", f"no schema {body.schema_id!r}")
        try:
            document = store.bind_schema(doc_id, body.schema_id)
        except SenTagError as exc:
            raise ApiError(409, exc.code, exc.message, **exc.details)
        return {"id": document.id, "schema_id": document.schema_id}

    @app.put("/api/documents/{doc_id}/annotators")
    def set_annotators(
        doc_id: str, body: AnnotatorsBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "assign")
        get_document_or_404(doc_id)
        for annotator_id in body.annotator_ids:
            if store.get_user(annotator_id) is None:
                raise ApiError(404, "NotFound", f"no user {annotator_id!r}")
        return store.set_annotators(doc_id, body.annotator_ids)

    @app.get("/api/my/documents")
    def my_documents(user: User = Depends(current_user)) -> dict:
        require(user, "annotate")
        pending, completed = [], []
        for assignment in store.list_assignments_for_annotator(user.id):
            document = store.get_document(assignment.document_id)
            entry = _assignment_payload(assignment, document)
            if assignment.status in (
                AssignmentStatus.COMPLETED,
                AssignmentStatus.VALIDATED,
            ):
                completed.append(entry)
            else:
                pending.append(entry)
        return {"pending": pending, "completed": completed}

    @app.get("/api/documents/{doc_id}/annotations")
    def get_annotations(
        doc_id: str,
        annotator: str | None = Query(default=None),
        user: User = Depends(current_user),
    ) -> dict:
        require(user, "annotate")
        document = get_document_or_404(doc_id)
        annotator_id = resolve_annotator(user, annotator)
        get_assignment_or_404(doc_id, annotator_id)
        tagset = (
            store.get_tagset(document.schema_id) if document.schema_id else None
        )
        annotation_set = store.load_annotation_set(
            doc_id, annotator_id, len(document.text), tagset
        )
        return _set_payload(annotation_set)

    @app.put("/api/documents/{doc_id}/annotations")
    def put_annotations(
        doc_id: str, body: AnnotationsBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "annotate")
        document = get_document_or_404(doc_id)
        assignment = get_assignment_or_404(doc_id, user.id)
        tagset = tagset_for(document)

        # Build a fresh set through the validating path; only store on success,
        # so a rejected payload leaves the previous state untouched.
        annotation_set = AnnotationSet(doc_id, user.id, len(document.text), tagset)
        for span in body.spans:
            annotation_set.add_span(
                span.tag, span.start, span.end, span.attributes, span_id=span.id
            )
        store.save_annotation_set(annotation_set)
        reset_after_edit(assignment)
        store.save_assignment(assignment)
        # the stored report (if any) described the previous spans; without
        # this, VALIDATED could be reached on the strength of a stale report
        store.delete_report(doc_id, user.id)
        load_synced_graph(document, annotation_set, tagset)
        return _set_payload(annotation_set)

    @app.put("/api/documents/{doc_id}/status")
    def put_status(
        doc_id: str, body: StatusBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "annotate")
        get_document_or_404(doc_id)
        assignment = get_assignment_or_404(doc_id, user.id)
        try:
            new_status = AssignmentStatus(body.status)
        except ValueError:
            raise ApiError(422, "InvalidStatus", f"unknown status {body.status!r}")
        validation_passed = False
        if new_status is AssignmentStatus.VALIDATED:
            report = store.load_report(doc_id, user.id)
            validation_passed = report is not None and report.passed
        transition(assignment, new_status, validation_passed=validation_passed)
        store.save_assignment(assignment)
        return {"document_id": doc_id, "status": assignment.status.value}

    @app.post("/api/documents/{doc_id}/validate")
    def validate_document(doc_id: str, user: User = Depends(current_user)) -> dict:
        require(user, "validate_own")
        document = get_document_or_404(doc_id)
        assignment = get_assignment_or_404(doc_id, user.id)
        tagset = tagset_for(document)
        annotation_set = store.load_annotation_set(
            doc_id, user.id, len(document.text), tagset
        )
        report = validate_spans(annotation_set, tagset)
        report.document_id = doc_id
        report.annotator_id = user.id
        store.save_report(report)
        if report.passed and assignment.status is AssignmentStatus.COMPLETED:
            transition(
                assignment, AssignmentStatus.VALIDATED, validation_passed=True
            )
            store.save_assignment(assignment)
        payload = report.to_payload()
        payload["status"] = assignment.status.value
        return payload

    @app.get("/api/documents/{doc_id}/graph")
    def get_graph(
        doc_id: str,
        annotator: str | None = Query(default=None),
        user: User = Depends(current_user),
    ) -> dict:
        require(user, "edit_graph")
        document = get_document_or_404(doc_id)
        annotator_id = resolve_annotator(user, annotator)
        get_assignment_or_404(doc_id, annotator_id)
        tagset = tagset_for(document)
        annotation_set = store.load_annotation_set(
            doc_id, annotator_id, len(document.text), tagset
        )
        graph = load_synced_graph(document, annotation_set, tagset)
        return graph.to_payload(annotation_set)

    @app.put("/api/documents/{doc_id}/graph")
    def put_graph(
        doc_id: str, body: GraphBody, user: User = Depends(current_user)
    ) -> dict:
        require(user, "edit_graph")
        document = get_document_or_404(doc_id)
        get_assignment_or_404(doc_id, user.id)
        tagset = tagset_for(document)
        annotation_set = store.load_annotation_set(
            doc_id, user.id, len(document.text), tagset
        )
        graph = ArgumentGraph(doc_id, user.id)
        graph.sync_nodes(annotation_set, tagset)
        for edge in body.edges:
            graph.add_edge(edge.src, edge.dst)  # 422 on cycle/self-loop/...
        store.save_graph(graph)
        return graph.to_payload(annotation_set)

    @app.get("/api/documents/{doc_id}/agreement")
    def get_agreement(doc_id: str, user: User = Depends(current_user)) -> dict:
        require(user, "view_agreement")
        document = get_document_or_404(doc_id)
        return store.agreement_for_document(document).to_payload()

    @app.get("/api/documents/{doc_id}/export")
    def export_document(
        doc_id: str,
        annotator: str = Query(...),
        user: User = Depends(current_user),
    ) -> Response:
        require(user, "annotate")
        document = get_document_or_404(doc_id)
        annotator_id = resolve_annotator(user, annotator)
        get_assignment_or_404(doc_id, annotator_id)
        tagset_for(document)  # 409 before touching annotations
        return Response(
            content=build_export(store, document, annotator_id),
            media_type="application/xml",
        )

    ui_dir = os.environ.get("SENTAG_UI_DIR")
    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def build_export(store: Store, document: Document, annotator_id: str) -> bytes:
    """Shared by the API endpoint and the corpus-export CLI: the canonical
    XML bytes for one (document, annotator) pair."""
    tagset = store.get_tagset(document.schema_id) if document.schema_id else None
    annotation_set = store.load_annotation_set(
        document.id, annotator_id, len(document.text), tagset
    )
    graph = store.load_graph(document.id, annotator_id)
    if tagset is not None:
        graph.sync_nodes(annotation_set, tagset)
    return xmlio.serialize(document.text, annotation_set, graph).encode()
