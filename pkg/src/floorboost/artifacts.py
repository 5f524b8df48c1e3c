"""Artifact hygiene: atomic writes, content hashes, run manifests.

Commands stage their outputs through temp files in the destination
directory so a failure never leaves a partial artifact, and every run
writes a manifest echoing the fully resolved configuration plus the
sha256 of each input and output. Manifests carry no timestamps, so a
rerun with the same config reproduces every byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    atomic_write_text(path, dump_json(obj))


def write_manifest(path, command: str, config: dict, inputs: dict, artifacts: dict) -> None:
    """``inputs``/``artifacts`` map names to file paths; hashed here."""
    manifest = {
        "command": command,
        "config": config,
        "inputs": {name: sha256_file(p) for name, p in sorted(inputs.items())},
        "artifacts": {name: sha256_file(p) for name, p in sorted(artifacts.items())},
        "tool": "floorboost",
    }
    write_json(path, manifest)
