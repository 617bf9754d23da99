"""Deterministic serialization helpers shared by the CLI outputs."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__

TOOL = "accelfatigue"


def format_real(x: float) -> str:
    """17 significant digits: enough to round-trip any float64 exactly."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(x, ".17g")
    if all(c not in text for c in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int, out: list[str]) -> None:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        # Infinite elongation (a degenerate cloud) has no JSON literal.
        out.append("null" if not math.isfinite(obj) else format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(str(key), ensure_ascii=False) + ": ")
            _encode(value, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        # Lists of scalars stay on one line; nested structures are broken out.
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            parts: list[str] = []
            for v in items:
                _encode(v, indent, level + 1, parts)
                parts.append(", ")
            out.append("[" + "".join(parts[:-1]) + "]")
            return
        out.append("[")
        for i, value in enumerate(items):
            out.append(("," if i else "") + pad)
            _encode(value, indent, level + 1, out)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with keys in insertion order and reals at 17 significant digits."""
    out: list[str] = []
    _encode(obj, indent, 0, out)
    return "".join(out) + "\n"


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def metadata(command: str, config: dict, inputs: list[str] | None = None) -> dict:
    """Metadata block echoed into every output: tool version, config, input digests."""
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": [{"path": str(p), "digest": file_digest(p)} for p in (inputs or [])],
    }
