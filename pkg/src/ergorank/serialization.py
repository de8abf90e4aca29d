"""Canonical JSON emission, content hashing, and atomic file writes.

Every artifact the package writes goes through `canonical_dumps` so that
identical inputs produce byte-identical files.  Floats are serialized with
Python's shortest round-trip repr, which preserves full precision.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile


def canonical_dumps(obj) -> str:
    """Serialize `obj` to the canonical JSON text used for all artifacts.

    Key order is the insertion order of the dicts handed in; callers build
    their dicts in the documented field order.  NaN/Inf are rejected.
    """
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def canonical_loads(text: str):
    return json.loads(text)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def atomic_write_text(path: str, text: str) -> None:
    """Write `text` to `path` via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json_file(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
