"""Command-line interface.

    arbiter compile salary.sbp --mode advanced -o salary.grg
    arbiter check salary.grg
    arbiter register salary.sbp --id salary --mode advanced --registry ./registry
    arbiter query salary --bind offered_salary=70000 --bind expected_salary=80000
    arbiter serve --registry ./registry --port 8000

``query`` accepts a registered application id (resolved against
``--registry`` or ``$ARBITER_REGISTRY``), a path to an application
directory, or a bare ``.grg``/``.sbp`` file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analysis import validate_theory
from .errors import ArbiterError
from .explain import render_text
from .language import render_theory
from .parser import parse_theory
from .policy import compile_policy, metadata_of, parse_policy
from .registry import (
    Registry,
    build_theory,
    default_registry_path,
    load_application,
)
from .service import QueryBody, execute_query, validate_context


@click.group()
def main():
    """Preference-based argumentation decision engine."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@main.command("compile")
@click.argument("policy_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", type=click.Choice(["basic", "advanced"]), default="basic")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path))
def compile_cmd(policy_file: Path, mode: str, output: Path | None):
    """Compile a policy file into rule-language text."""
    try:
        theory = compile_policy(parse_policy(policy_file.read_text()), mode)
    except ArbiterError as exc:
        _fail(str(exc))
    text = render_theory(theory)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text)
        click.echo(f"wrote {output}")


@main.command("check")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def check_cmd(file: Path):
    """Parse and statically validate a .grg or .sbp file; exit 1 on errors."""
    try:
        if file.suffix == ".sbp":
            document = parse_policy(file.read_text())
            theories = [compile_policy(document, "basic")]
            if any(s.condition is not None for s in document.scenarios.values()):
                theories.append(compile_policy(document, "advanced"))
        else:
            theories = [parse_theory(file.read_text())]
    except ArbiterError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    failed = False
    for theory in theories:
        for diagnostic in validate_theory(theory):
            click.echo(str(diagnostic), err=True)
            failed = failed or diagnostic.severity == "error"
    sys.exit(1 if failed else 0)


def _load_query_target(app: str, registry_path: str, mode: str):
    path = Path(app)
    if path.is_dir():
        return load_application(path)
    if path.is_file():
        kind = "sbp" if path.suffix == ".sbp" else "grg"
        theory = build_theory(path.read_text(), kind, mode)
        from .registry import ApplicationRecord

        return ApplicationRecord(
            app_id=path.stem,
            name=path.stem,
            revision=0,
            kind=kind,
            mode=mode if kind == "sbp" else None,
            created_at="",
            theory=theory,
            metadata=metadata_of(theory),
            source=path.read_text(),
        )
    return Registry(registry_path).load(app)


@main.command("query")
@click.argument("app")
@click.option("--registry", default=None, help="registry directory (default: $ARBITER_REGISTRY)")
@click.option("--fact", "facts", multiple=True, help="propositional scenario element id")
@click.option("--bind", "binds", multiple=True, metavar="NAME=VALUE", help="numeric input")
@click.option("--abduce", default=None, metavar="OPTION", help="search assumptions for OPTION")
@click.option("--mode", type=click.Choice(["basic", "advanced"]), default="basic",
              help="compile mode when APP is a bare .sbp file")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def query_cmd(app, registry, facts, binds, abduce, mode, as_json):
    """Query an application for acceptable options within a context."""
    bindings: dict[str, list[str]] = {}
    for item in binds:
        name, _, value = item.partition("=")
        if not value:
            _fail(f"--bind expects NAME=VALUE, got {item!r}")
        bindings.setdefault(name, []).append(value)
    try:
        record = _load_query_target(app, registry or default_registry_path(), mode)
    except (ArbiterError, KeyError) as exc:
        _fail(str(exc))
    body = QueryBody(facts=list(facts), bindings=bindings, abduce_for=abduce)
    findings = validate_context(body, record.metadata)
    if findings:
        for finding in findings:
            click.echo(str(finding), err=True)
        sys.exit(1)
    try:
        result, response = execute_query(record, body)
    except ArbiterError as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(response, indent=2, sort_keys=True))
        return
    if not response["acceptable_options"]:
        click.echo("no acceptable options")
    for option in response["acceptable_options"]:
        for explanation in result.per_option.get(option, ()):
            click.echo(render_text(explanation))
    if response["ambiguous"]:
        click.echo("ambiguous: complementary options are simultaneously acceptable")
    if abduce is not None:
        if not response["assumptions"]:
            click.echo(f"no assumption set makes {abduce!r} acceptable")
        for entry in response["assumptions"]:
            shown = ", ".join(entry["assumptions"]) or "(nothing)"
            click.echo(f"{abduce} acceptable assuming: {shown}")


@main.command("register")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--id", "app_id", required=True, help="application id")
@click.option("--registry", default=None, help="registry directory (default: $ARBITER_REGISTRY)")
@click.option("--mode", type=click.Choice(["basic", "advanced"]), default="basic")
@click.option("--name", default=None)
def register_cmd(file: Path, app_id, registry, mode, name):
    """Compile and deploy an application into the registry."""
    kind = "sbp" if file.suffix == ".sbp" else "grg"
    try:
        record = Registry(registry or default_registry_path()).register(
            app_id, file.read_text(), kind, mode=mode, name=name
        )
    except (ArbiterError, ValueError) as exc:
        _fail(str(exc))
    click.echo(
        f"registered {record.app_id} revision {record.revision} "
        f"({len(record.metadata.options)} options, "
        f"{len(record.metadata.scenario_elements)} scenario elements)"
    )


@main.command("serve")
@click.option("--registry", default=None, help="registry directory (default: $ARBITER_REGISTRY)")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve_cmd(registry, host, port):
    """Run the decision service over HTTP."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(registry or default_registry_path()), host=host, port=port)


if __name__ == "__main__":
    main()
