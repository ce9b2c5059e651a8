"""Config validation and deterministic output files."""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

from . import __version__
from .coding.config import _round, canonical_json, config_hash
from .errors import InvalidArgument

SCHEMA_FILES = ("channel", "aux", "search", "region", "sim")


@lru_cache(maxsize=None)
def _registry() -> Registry:
    docs = []
    for name in SCHEMA_FILES:
        text = resources.files("sdmawc.schemas").joinpath(f"{name}.schema.json").read_text()
        doc = json.loads(text)
        docs.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(docs)


def schema(kind: str) -> dict:
    if kind not in SCHEMA_FILES:
        raise InvalidArgument(f"unknown schema {kind!r}")
    return _registry()[f"urn:sdmawc:{kind}"].contents


def validate_document(doc, kind: str) -> None:
    """Raise InvalidArgument with the first schema violation, if any."""
    validator = jsonschema.Draft202012Validator(schema(kind), registry=_registry())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InvalidArgument(f"config does not match the {kind} schema at {where}: {e.message}")


def detect_kind(doc) -> str:
    return "sim" if isinstance(doc, dict) and "rates" in doc else "region"


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path} is not valid JSON: {exc}") from None


def fmt(x) -> str:
    """12 significant digits for floats; plain text otherwise."""
    x = _round(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    return "" if x is None else str(x)


def write_json(path: Path, obj) -> Path:
    path.write_bytes(canonical_json(obj).encode())
    return path


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def timestamp() -> str:
    """SOURCE_DATE_EPOCH when set, otherwise the epoch, so reruns stay byte-identical."""
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return dt.datetime.fromtimestamp(epoch, dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_manifest(out: Path, command: str, config, seed, files) -> Path:
    entries = [{"file": f.name, "sha256": hashlib.sha256(f.read_bytes()).hexdigest()}
               for f in sorted(files, key=lambda f: f.name)]
    stamp = timestamp()
    return write_json(out / "manifest.json", {
        "command": command, "config_hash": config_hash(config), "seed": seed,
        "version": __version__, "timestamps": {"started": stamp, "finished": stamp},
        "outputs": entries})
