"""SQLite-backed persistence.

One connection guarded by a re-entrant lock: all writes to a (document,
annotator) pair — and in fact all writes — are serialized, which is the
concurrency contract the HTTP layer relies on (last write wins, payloads
never interleave). Referential integrity is delegated to foreign keys with
cascading deletes: removing a document takes its assignments, annotation
sets, graphs, and reports with it.

Schema text is retained verbatim; tag sets are re-derived from it on load
(parsing is deterministic), with a small cache per schema id.
"""

from __future__ import annotations

import json
import secrets
import sqlite3
import threading
import time
from pathlib import Path

from .. import xmlio
from ..agreement import AgreementReport, document_agreement
from ..core import (
    Assignment,
    AssignmentStatus,
    AnnotationSet,
    Document,
    Role,
    Span,
    User,
)
from ..errors import SenTagError
from ..graph import ArgumentGraph
from ..schema import ReportEntry, TagSet, ValidationReport, parse_schema
from . import auth


class DuplicateUsername(SenTagError):
    """Username already taken."""


class SchemaConflict(SenTagError):
    """Document already has annotations under a different schema."""


_TABLES = """
CREATE TABLE IF NOT EXISTS users (
    id TEXT PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    role TEXT NOT NULL,
    credential_hash TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    user_id TEXT NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    expires_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS schemas (
    id TEXT PRIMARY KEY,
    schema_text TEXT NOT NULL,
    created_by TEXT REFERENCES users(id)
);
CREATE TABLE IF NOT EXISTS documents (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    text TEXT NOT NULL,
    schema_id TEXT REFERENCES schemas(id),
    created_by TEXT REFERENCES users(id)
);
CREATE TABLE IF NOT EXISTS assignments (
    document_id TEXT NOT NULL REFERENCES documents(id) ON DELETE CASCADE,
    annotator_id TEXT NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    status TEXT NOT NULL,
    last_modified REAL NOT NULL,
    PRIMARY KEY (document_id, annotator_id)
);
CREATE TABLE IF NOT EXISTS annotation_sets (
    document_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    spans_json TEXT NOT NULL,
    PRIMARY KEY (document_id, annotator_id),
    FOREIGN KEY (document_id, annotator_id)
        REFERENCES assignments(document_id, annotator_id) ON DELETE CASCADE
);
CREATE TABLE IF NOT EXISTS graphs (
    document_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    edges_json TEXT NOT NULL,
    PRIMARY KEY (document_id, annotator_id),
    FOREIGN KEY (document_id, annotator_id)
        REFERENCES assignments(document_id, annotator_id) ON DELETE CASCADE
);
CREATE TABLE IF NOT EXISTS reports (
    document_id TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    report_json TEXT NOT NULL,
    created_at REAL NOT NULL,
    PRIMARY KEY (document_id, annotator_id),
    FOREIGN KEY (document_id, annotator_id)
        REFERENCES assignments(document_id, annotator_id) ON DELETE CASCADE
);
"""


def _span_to_json(span: Span) -> dict:
    return {
        "id": span.id,
        "tag": span.tag,
        "start": span.start,
        "end": span.end,
        "attributes": span.attributes,
    }


def _span_from_json(data: dict) -> Span:
    return Span(
        id=data["id"],
        tag=data["tag"],
        start=data["start"],
        end=data["end"],
        attributes=dict(data.get("attributes") or {}),
    )


class Store:
    def __init__(self, path: str | Path):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._lock = threading.RLock()
        self._tagset_cache: dict[str, TagSet] = {}
        with self._lock, self._conn:
            self._conn.executescript(_TABLES)

    def close(self) -> None:
        self._conn.close()

    def _new_id(self, prefix: str, table: str) -> str:
        while True:
            candidate = f"{prefix}_{secrets.token_hex(4)}"
            row = self._conn.execute(
                f"SELECT 1 FROM {table} WHERE id = ?", (candidate,)
            ).fetchone()
            if row is None:
                return candidate

    # --- users & sessions ---

    def create_user(self, username: str, password: str, role: Role) -> User:
        with self._lock:
            credential_hash = auth.hash_password(password)
            user_id = self._new_id("u", "users")
            try:
                with self._conn:
                    self._conn.execute(
                        "INSERT INTO users VALUES (?, ?, ?, ?)",
                        (user_id, username, role.value, credential_hash),
                    )
            except sqlite3.IntegrityError as exc:
                raise DuplicateUsername(
                    f"duplicate username {username!r}", username=username
                ) from exc
            return User(user_id, username, role, credential_hash)

    def get_user(self, user_id: str) -> User | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, username, role, credential_hash FROM users WHERE id = ?",
                (user_id,),
            ).fetchone()
        return None if row is None else User(row[0], row[1], Role(row[2]), row[3])

    def get_user_by_username(self, username: str) -> User | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, username, role, credential_hash FROM users"
                " WHERE username = ?",
                (username,),
            ).fetchone()
        return None if row is None else User(row[0], row[1], Role(row[2]), row[3])

    def list_users(self) -> list[User]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, username, role, credential_hash FROM users"
                " ORDER BY username"
            ).fetchall()
        return [User(r[0], r[1], Role(r[2]), r[3]) for r in rows]

    def create_session(self, user_id: str, ttl_seconds: int) -> str:
        with self._lock:
            token = auth.new_session_token()
            with self._conn:
                self._conn.execute(
                    "DELETE FROM sessions WHERE expires_at < ?", (time.time(),)
                )
                self._conn.execute(
                    "INSERT INTO sessions VALUES (?, ?, ?)",
                    (token, user_id, time.time() + ttl_seconds),
                )
            return token

    def user_for_token(self, token: str) -> User | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, expires_at FROM sessions WHERE token = ?",
                (token,),
            ).fetchone()
            if row is None or row[1] < time.time():
                return None
            return self.get_user(row[0])

    # --- schemas ---

    def add_schema(self, schema_text: str, created_by: str | None = None) -> TagSet:
        with self._lock:
            tagset = parse_schema(schema_text)  # fail before storing anything
            schema_id = self._new_id("sc", "schemas")
            with self._conn:
                self._conn.execute(
                    "INSERT INTO schemas VALUES (?, ?, ?)",
                    (schema_id, schema_text, created_by),
                )
            tagset = tagset.with_id(schema_id)
            self._tagset_cache[schema_id] = tagset
            return tagset

    def get_tagset(self, schema_id: str) -> TagSet | None:
        with self._lock:
            cached = self._tagset_cache.get(schema_id)
            if cached is not None:
                return cached
            row = self._conn.execute(
                "SELECT schema_text FROM schemas WHERE id = ?", (schema_id,)
            ).fetchone()
            if row is None:
                return None
            tagset = parse_schema(row[0], schema_id=schema_id)
            self._tagset_cache[schema_id] = tagset
            return tagset

    def get_schema_text(self, schema_id: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT schema_text FROM schemas WHERE id = ?", (schema_id,)
            ).fetchone()
        return None if row is None else row[0]

    def list_schemas(self) -> list[TagSet]:
        with self._lock:
            rows = self._conn.execute("SELECT id FROM schemas ORDER BY id").fetchall()
            return [self.get_tagset(r[0]) for r in rows]

    # --- documents ---

    def add_document(
        self, title: str, text: str, created_by: str | None = None
    ) -> Document:
        """Ingest a document. CRLF is normalized to LF first so character
        offsets are stable across platforms; text that XML 1.0 cannot carry
        is rejected here, before anything is stored."""
        with self._lock:
            text = text.replace("\r\n", "\n")
            xmlio.check_representable(text)
            doc_id = self._new_id("d", "documents")
            with self._conn:
                self._conn.execute(
                    "INSERT INTO documents VALUES (?, ?, ?, NULL, ?)",
                    (doc_id, title, text, created_by),
                )
            return Document(id=doc_id, title=title, text=text, created_by=created_by)

    def get_document(self, doc_id: str) -> Document | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, title, text, schema_id, created_by FROM documents"
                " WHERE id = ?",
                (doc_id,),
            ).fetchone()
        if row is None:
            return None
        return Document(
            id=row[0], title=row[1], text=row[2], schema_id=row[3], created_by=row[4]
        )

    def list_documents(self) -> list[Document]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id FROM documents ORDER BY title, id"
            ).fetchall()
            return [self.get_document(r[0]) for r in rows]

    def bind_schema(self, doc_id: str, schema_id: str) -> Document:
        with self._lock:
            document = self.get_document(doc_id)
            if document is None:
                raise KeyError(doc_id)
            if document.schema_id is not None and document.schema_id != schema_id:
                count = self._conn.execute(
                    "SELECT COUNT(*) FROM annotation_sets WHERE document_id = ?",
                    (doc_id,),
                ).fetchone()[0]
                if count:
                    raise SchemaConflict(
                        "document already has annotations under schema "
                        f"{document.schema_id!r}",
                        schema_id=document.schema_id,
                    )
            with self._conn:
                self._conn.execute(
                    "UPDATE documents SET schema_id = ? WHERE id = ?",
                    (schema_id, doc_id),
                )
            return document.with_schema(schema_id)

    def delete_document(self, doc_id: str) -> None:
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM documents WHERE id = ?", (doc_id,))

    # --- assignments ---

    def set_annotators(self, doc_id: str, annotator_ids: list[str]) -> dict:
        """Reconcile assignments with the given annotator list: missing ones
        are created as ASSIGNED, absent ones are revoked (their work goes
        with them, by cascade)."""
        with self._lock:
            existing = {
                a.annotator_id for a in self.list_assignments_for_document(doc_id)
            }
            wanted = set(annotator_ids)
            now = time.time()
            with self._conn:
                for annotator_id in sorted(wanted - existing):
                    self._conn.execute(
                        "INSERT INTO assignments VALUES (?, ?, ?, ?)",
                        (doc_id, annotator_id, AssignmentStatus.ASSIGNED.value, now),
                    )
                for annotator_id in sorted(existing - wanted):
                    self._conn.execute(
                        "DELETE FROM assignments"
                        " WHERE document_id = ? AND annotator_id = ?",
                        (doc_id, annotator_id),
                    )
            return {
                "created": sorted(wanted - existing),
                "revoked": sorted(existing - wanted),
            }

    def get_assignment(self, doc_id: str, annotator_id: str) -> Assignment | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT document_id, annotator_id, status, last_modified"
                " FROM assignments WHERE document_id = ? AND annotator_id = ?",
                (doc_id, annotator_id),
            ).fetchone()
        if row is None:
            return None
        return Assignment(row[0], row[1], AssignmentStatus(row[2]), row[3])

    def save_assignment(self, assignment: Assignment) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE assignments SET status = ?, last_modified = ?"
                " WHERE document_id = ? AND annotator_id = ?",
                (
                    assignment.status.value,
                    assignment.last_modified,
                    assignment.document_id,
                    assignment.annotator_id,
                ),
            )

    def list_assignments_for_document(self, doc_id: str) -> list[Assignment]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT document_id, annotator_id, status, last_modified"
                " FROM assignments WHERE document_id = ? ORDER BY annotator_id",
                (doc_id,),
            ).fetchall()
        return [Assignment(r[0], r[1], AssignmentStatus(r[2]), r[3]) for r in rows]

    def list_assignments_for_annotator(self, annotator_id: str) -> list[Assignment]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT document_id, annotator_id, status, last_modified"
                " FROM assignments WHERE annotator_id = ? ORDER BY document_id",
                (annotator_id,),
            ).fetchall()
        return [Assignment(r[0], r[1], AssignmentStatus(r[2]), r[3]) for r in rows]

    # --- annotation sets, graphs, reports ---

    def save_annotation_set(self, annotation_set: AnnotationSet) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO annotation_sets VALUES (?, ?, ?)",
                (
                    annotation_set.document_id,
                    annotation_set.annotator_id,
                    json.dumps([_span_to_json(s) for s in annotation_set]),
                ),
            )

    def load_annotation_set(
        self,
        doc_id: str,
        annotator_id: str,
        text_length: int,
        tagset: TagSet | None,
    ) -> AnnotationSet:
        """Stored spans were validated on the way in; absent rows load as an
        empty set."""
        with self._lock:
            row = self._conn.execute(
                "SELECT spans_json FROM annotation_sets"
                " WHERE document_id = ? AND annotator_id = ?",
                (doc_id, annotator_id),
            ).fetchone()
        annotation_set = AnnotationSet(doc_id, annotator_id, text_length, tagset)
        if row is not None:
            annotation_set._adopt([_span_from_json(d) for d in json.loads(row[0])])
        return annotation_set

    def save_graph(self, graph: ArgumentGraph) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO graphs VALUES (?, ?, ?)",
                (
                    graph.document_id,
                    graph.annotator_id,
                    json.dumps(sorted(list(e) for e in graph.edges)),
                ),
            )

    def load_graph(self, doc_id: str, annotator_id: str) -> ArgumentGraph:
        with self._lock:
            row = self._conn.execute(
                "SELECT edges_json FROM graphs"
                " WHERE document_id = ? AND annotator_id = ?",
                (doc_id, annotator_id),
            ).fetchone()
        graph = ArgumentGraph(doc_id, annotator_id)
        if row is not None:
            edges = [tuple(e) for e in json.loads(row[0])]
            graph.nodes = {v for edge in edges for v in edge}
            graph.edges = set(edges)
        return graph

    def delete_report(self, doc_id: str, annotator_id: str) -> None:
        """Reports describe one exact span set; span edits orphan them."""
        with self._lock, self._conn:
            self._conn.execute(
                "DELETE FROM reports WHERE document_id = ? AND annotator_id = ?",
                (doc_id, annotator_id),
            )

    def save_report(self, report: ValidationReport) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO reports VALUES (?, ?, ?, ?)",
                (
                    report.document_id,
                    report.annotator_id,
                    json.dumps(report.to_payload()),
                    time.time(),
                ),
            )

    def load_report(self, doc_id: str, annotator_id: str) -> ValidationReport | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT report_json FROM reports"
                " WHERE document_id = ? AND annotator_id = ?",
                (doc_id, annotator_id),
            ).fetchone()
        if row is None:
            return None
        data = json.loads(row[0])
        return ValidationReport(
            errors=[
                ReportEntry(e["code"], e["message"], e["location"])
                for e in data["errors"]
            ],
            document_id=data["document_id"],
            annotator_id=data["annotator_id"],
        )

    # --- composite views ---

    def agreement_for_document(self, document: Document) -> AgreementReport:
        with self._lock:
            tagset = (
                self.get_tagset(document.schema_id) if document.schema_id else None
            )
            work = []
            for assignment in self.list_assignments_for_document(document.id):
                annotation_set = self.load_annotation_set(
                    document.id,
                    assignment.annotator_id,
                    len(document.text),
                    tagset,
                )
                report = self.load_report(document.id, assignment.annotator_id)
                work.append((assignment, annotation_set, report))
        return document_agreement(document.id, len(document.text), work)
