"""Atomic file output."""

import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename.

    Readers never see a partial file, and a failure leaves any previous file
    untouched.
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def format_float(x):
    """17 significant digits; ``inf``/``nan`` spelled as Python parses them."""
    return format(float(x), ".17g")


def format_table(columns, rows, footer=()):
    """CSV text with a header row and ``# key=value`` footer lines."""
    out = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        out.append(",".join(format_float(v) for v in row))
    out.extend(f"# {key}={format_float(value)}" for key, value in footer)
    return "\n".join(out) + "\n"


def parse_table(text):
    """Inverse of :func:`format_table`: ``(columns, rows, footer_dict)``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty table")
    columns = tuple(lines[0].split(","))
    rows, footer = [], {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, sep, value = ln[1:].strip().partition("=")
            if sep:
                footer[key.strip()] = float(value)
            continue
        fields = ln.split(",")
        if len(fields) != len(columns):
            raise ValueError(f"expected {len(columns)} fields, got {len(fields)}: {ln!r}")
        rows.append(tuple(float(v) for v in fields))
    return columns, rows, footer
