"""CSV reading and writing for experiment artifacts.

Every output file starts with comment lines recording the package version,
the command line that produced it, and the seed, so any artifact can be
regenerated exactly. Floats are written with 17 significant digits (full
round-trip precision) and LF line endings.
"""

from __future__ import annotations

import math
from pathlib import Path


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def write_csv(path, header: list[str], rows, meta: dict | None = None) -> Path:
    """Write rows with a comment preamble; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path):
    """Read a comment-prefixed CSV back into (meta, header, rows of strings)."""
    meta, header, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, header, rows


class DatasetFormatError(ValueError):
    """A dataset CSV violates the expected schema."""


def load_dataset_csv(path):
    """Load a feature/label dataset: header x1..xd, final column y in {-1,1}
    (0/1 accepted and mapped to -1/+1). Returns (features, labels) lists.

    Malformed rows raise DatasetFormatError naming the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    features, labels = [], []
    width = None
    header_seen = False
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if not header_seen:
            if cells[-1] != "y" or any(not c for c in cells):
                raise DatasetFormatError(
                    f"line {lineno}: expected a header row ending in 'y', got {line!r}"
                )
            width = len(cells)
            header_seen = True
            continue
        if len(cells) != width:
            raise DatasetFormatError(
                f"line {lineno}: expected {width} columns, got {len(cells)}"
            )
        try:
            row = [float(c) for c in cells[:-1]]
            label = float(cells[-1])
        except ValueError as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from None
        if label not in (-1.0, 0.0, 1.0):
            raise DatasetFormatError(
                f"line {lineno}: label must be -1/1 or 0/1, got {cells[-1]}"
            )
        features.append(row)
        labels.append(int(label) if label != 0.0 else -1)
    if not header_seen:
        raise DatasetFormatError("file has no header row")
    return features, labels
