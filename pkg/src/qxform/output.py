"""CSV/JSON emitters used by the CLI.

CSV: UTF-8, header row first, complex values split into ``_re``/``_im``
columns by the caller. JSON: sorted keys, fixed indentation, floats via
``repr`` so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

from .errors import QxformError


class OutputError(QxformError, OSError):
    pass


def resolve_path(path, default_name=None):
    """Apply ``QXFORM_OUT`` to relative paths; ``None`` means stdout unless the env var is set."""
    out_dir = os.environ.get("QXFORM_OUT")
    if path is None:
        if out_dir and default_name:
            return Path(out_dir) / default_name
        return None
    p = Path(path)
    if out_dir and not p.is_absolute():
        p = Path(out_dir) / p
    return p


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_text(text: str, path, stream=None) -> str | None:
    """Write to ``path`` (creating parents) or to ``stream`` when path is None."""
    if path is None:
        if stream is not None:
            stream.write(text)
        return None
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return str(path)


def emit_csv(header, rows, path=None, stream=None):
    return write_text(csv_text(header, rows), path, stream)


def emit_json(obj, path=None, stream=None):
    return write_text(json_text(obj), path, stream)
