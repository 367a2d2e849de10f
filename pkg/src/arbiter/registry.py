"""Durable application registry: one directory per application, no database.

Layout per application::

    <registry>/<app_id>/
        app.json        # id, name, revision, kind, mode, created_at
        source.sbp      # or source.grg: the text as registered
        theory.grg      # canonical compiled theory
        metadata.json   # options and scenario elements

Writes go through a per-application lock and land via atomic renames with
``app.json`` (carrying the revision) last, so concurrent readers never see
a half-written revision.
"""

from __future__ import annotations

import datetime
import json
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

from filelock import FileLock

from .language import Theory, render_theory
from .parser import parse_theory
from .policy import ApplicationMetadata, compile_policy, metadata_of, parse_policy

_APP_ID_RE = re.compile(r"[a-z][a-zA-Z0-9_-]*\Z")

REGISTRY_ENV_VAR = "ARBITER_REGISTRY"


@dataclass(frozen=True)
class ApplicationRecord:
    app_id: str
    name: str
    revision: int
    kind: str  # 'sbp' | 'grg'
    mode: str | None  # compile mode for sbp sources
    created_at: str
    theory: Theory
    metadata: ApplicationMetadata
    source: str

    def info(self) -> dict:
        return {
            "app_id": self.app_id,
            "name": self.name,
            "revision": self.revision,
            "kind": self.kind,
            "mode": self.mode,
            "created_at": self.created_at,
        }


def build_theory(source: str, kind: str, mode: str = "basic") -> Theory:
    if kind == "sbp":
        return compile_policy(parse_policy(source), mode)
    if kind == "grg":
        return parse_theory(source)
    raise ValueError(f"unknown source kind {kind!r}; expected 'sbp' or 'grg'")


class Registry:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def app_dir(self, app_id: str) -> Path:
        return self.root / app_id

    def exists(self, app_id: str) -> bool:
        return (self.app_dir(app_id) / "app.json").is_file()

    def register(
        self,
        app_id: str,
        source: str,
        kind: str,
        mode: str = "basic",
        name: str | None = None,
    ) -> ApplicationRecord:
        """Compile, validate, and persist; re-registration bumps the revision."""
        if not _APP_ID_RE.match(app_id):
            raise ValueError(f"invalid application id {app_id!r}")
        theory = build_theory(source, kind, mode)
        metadata = metadata_of(theory)
        if name is None:
            name = app_id
        directory = self.app_dir(app_id)
        directory.mkdir(parents=True, exist_ok=True)
        with FileLock(str(directory) + ".lock"):
            revision, created_at = 1, _utcnow()
            info_path = directory / "app.json"
            if info_path.is_file():
                previous = json.loads(info_path.read_text())
                revision = previous.get("revision", 0) + 1
                created_at = previous.get("created_at", created_at)
            record = ApplicationRecord(
                app_id=app_id,
                name=name,
                revision=revision,
                kind=kind,
                mode=mode if kind == "sbp" else None,
                created_at=created_at,
                theory=theory,
                metadata=metadata,
                source=source,
            )
            _atomic_write(directory / f"source.{kind}", source)
            for stale_kind in ("sbp", "grg"):
                if stale_kind != kind:
                    stale = directory / f"source.{stale_kind}"
                    if stale.exists():
                        stale.unlink()
            _atomic_write(directory / "theory.grg", render_theory(theory))
            _atomic_write(
                directory / "metadata.json", json.dumps(metadata.to_json(), indent=2)
            )
            _atomic_write(info_path, json.dumps(record.info(), indent=2))
        return record

    def load(self, app_id: str) -> ApplicationRecord:
        return load_application(self.app_dir(app_id))

    def list(self) -> list[dict]:
        entries = []
        for child in sorted(self.root.iterdir()):
            if (child / "app.json").is_file():
                info = json.loads((child / "app.json").read_text())
                entries.append(
                    {
                        "app_id": info["app_id"],
                        "name": info["name"],
                        "revision": info["revision"],
                    }
                )
        return entries


def load_application(directory) -> ApplicationRecord:
    """Read one application directory; raises KeyError when absent."""
    directory = Path(directory)
    info_path = directory / "app.json"
    if not info_path.is_file():
        raise KeyError(f"no application at {directory}")
    info = json.loads(info_path.read_text())
    theory = parse_theory((directory / "theory.grg").read_text())
    metadata = ApplicationMetadata.from_json(
        json.loads((directory / "metadata.json").read_text())
    )
    kind = info.get("kind", "grg")
    source_path = directory / f"source.{kind}"
    source = source_path.read_text() if source_path.is_file() else ""
    return ApplicationRecord(
        app_id=info["app_id"],
        name=info["name"],
        revision=info["revision"],
        kind=kind,
        mode=info.get("mode"),
        created_at=info.get("created_at", ""),
        theory=theory,
        metadata=metadata,
        source=source,
    )


def default_registry_path() -> str:
    return os.environ.get(REGISTRY_ENV_VAR, "registry")


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _atomic_write(path: Path, text: str) -> None:
    handle, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(handle, "w") as stream:
            stream.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


__all__ = [
    "ApplicationRecord",
    "Registry",
    "REGISTRY_ENV_VAR",
    "build_theory",
    "default_registry_path",
    "load_application",
]
