"""Admin command line: store bootstrap, user management, corpus import and
export, agreement reporting, and serving the HTTP API.

Flags mirror the environment variables: --db / SENTAG_DB and
--addr / SENTAG_ADDR.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..core import AssignmentStatus, Role
from ..errors import SenTagError
from . import DEFAULT_ADDR, DEFAULT_DB, DEFAULT_SESSION_TTL, Config
from .store import Store


@click.group()
@click.option(
    "--db",
    "db_path",
    envvar="SENTAG_DB",
    default=DEFAULT_DB,
    show_default=True,
    help="Store location (SQLite file).",
)
@click.pass_context
def main(ctx: click.Context, db_path: str) -> None:
    """Administration commands for the annotation server."""
    ctx.obj = db_path


@main.command()
@click.option("--admin-user", default="admin", show_default=True)
@click.option("--admin-password", prompt=True, hide_input=True)
@click.pass_obj
def init(db_path: str, admin_user: str, admin_password: str) -> None:
    """Create the store and the first ADMIN user."""
    store = Store(db_path)
    try:
        user = store.create_user(admin_user, admin_password, Role.ADMIN)
    except SenTagError as exc:
        raise click.ClickException(exc.message)
    click.echo(f"store ready at {db_path}; admin user {user.username!r} ({user.id})")


@main.command("create-user")
@click.argument("username")
@click.option(
    "--role",
    type=click.Choice([r.value for r in Role]),
    default=Role.ANNOTATOR.value,
    show_default=True,
)
@click.option("--password", prompt=True, hide_input=True)
@click.pass_obj
def create_user(db_path: str, username: str, role: str, password: str) -> None:
    """Create a user with the given role."""
    store = Store(db_path)
    try:
        user = store.create_user(username, password, Role(role))
    except SenTagError as exc:
        raise click.ClickException(exc.message)
    click.echo(f"created {user.role.value} {user.username!r} ({user.id})")


@main.command("import-docs")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--as-user", "username", default=None,
              help="Uploader username (defaults to the first admin).")
@click.option("--schema", "schema_id", default=None,
              help="Schema id to bind to every imported document.")
@click.pass_obj
def import_docs(
    db_path: str, directory: str, username: str | None, schema_id: str | None
) -> None:
    """Load every .txt file in DIRECTORY as a document (title = file stem)."""
    store = Store(db_path)
    uploader = None
    if username is not None:
        uploader = store.get_user_by_username(username)
        if uploader is None:
            raise click.ClickException(f"no user {username!r}")
    else:
        uploader = next(
            (u for u in store.list_users() if u.role is Role.ADMIN), None
        )

    imported = 0
    failures = 0
    for path in sorted(Path(directory).glob("*.txt")):
        try:
            text = path.read_text(encoding="utf-8")
            document = store.add_document(
                path.stem, text, created_by=uploader.id if uploader else None
            )
            if schema_id is not None:
                store.bind_schema(document.id, schema_id)
            click.echo(f"{path.name}: imported as {document.id}")
            imported += 1
        except (OSError, ValueError, SenTagError) as exc:
            click.echo(f"{path.name}: FAILED ({exc})")
            failures += 1
    click.echo(f"{imported} imported, {failures} failed")
    if failures:
        sys.exit(1)


@main.command("export-corpus")
@click.argument("directory", type=click.Path(file_okay=False))
@click.pass_obj
def export_corpus(db_path: str, directory: str) -> None:
    """Write one XML file per validated (document, annotator) pair."""
    from .app import build_export

    store = Store(db_path)
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for document in store.list_documents():
        for assignment in store.list_assignments_for_document(document.id):
            if assignment.status is not AssignmentStatus.VALIDATED:
                continue
            data = build_export(store, document, assignment.annotator_id)
            target = out_dir / f"{document.id}__{assignment.annotator_id}.xml"
            target.write_bytes(data)
            click.echo(f"wrote {target}")
            written += 1
    click.echo(f"{written} files written")


@main.command()
@click.argument("doc_id")
@click.pass_obj
def agreement(db_path: str, doc_id: str) -> None:
    """Print the agreement report for a document as JSON."""
    store = Store(db_path)
    document = store.get_document(doc_id)
    if document is None:
        raise click.ClickException(f"no document {doc_id!r}")
    report = store.agreement_for_document(document)
    click.echo(json.dumps(report.to_payload(), indent=2))


@main.command()
@click.option(
    "--addr",
    envvar="SENTAG_ADDR",
    default=DEFAULT_ADDR,
    show_default=True,
    help="host:port to bind.",
)
@click.option(
    "--session-ttl",
    envvar="SENTAG_SESSION_TTL",
    default=DEFAULT_SESSION_TTL,
    show_default=True,
    type=int,
)
@click.pass_obj
def serve(db_path: str, addr: str, session_ttl: int) -> None:
    """Run the HTTP API."""
    import uvicorn

    from .app import create_app

    config = Config(addr=addr, db_path=db_path, session_ttl=session_ttl)
    app = create_app(Store(db_path), config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


if __name__ == "__main__":
    main()
