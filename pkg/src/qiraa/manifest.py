"""Run manifests: every CLI command records its config, seed and input
digests next to its output so any artifact can be regenerated."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path


def resolve_path(path: str | Path) -> Path:
    """Resolve a path, falling back to $QIRAA_DATA_DIR for relative names."""
    p = Path(path)
    if p.exists():
        return p
    root = os.environ.get("QIRAA_DATA_DIR")
    if root and not p.is_absolute():
        candidate = Path(root) / p
        if candidate.exists():
            return candidate
    return p


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_path: str | Path, command: str, config: dict,
                   inputs: dict[str, str | Path]) -> Path:
    """Write ``<out>.manifest.json`` describing how ``out`` was produced."""
    manifest = {
        "command": command,
        "config": config,
        "inputs": {
            name: {"path": str(p), "sha256": sha256_file(p)}
            for name, p in inputs.items()
        },
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    return path


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file + rename so failures never leave partial output."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
