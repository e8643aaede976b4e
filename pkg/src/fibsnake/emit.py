"""CSV, JSON and SVG writers for point sets, polygons and attractor covers.

Floats are written with 17 significant digits, which round-trips doubles
exactly; identical inputs therefore give byte-identical files.
"""
from __future__ import annotations

import io
import json
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence, TextIO

import numpy as np

from .geometry import Polygon2
from .ifs import AttractorCover

Destination = str | Path | TextIO | None


def fmt(x: float) -> str:
    x = float(x) + 0.0  # no negative zero
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, ".17g")


@contextmanager
def _open(dest: Destination) -> Iterator[TextIO]:
    if dest is None or dest == "-":
        yield sys.stdout
    elif isinstance(dest, (str, Path)):
        path = Path(dest)
        try:
            with path.open("w", encoding="utf-8", newline="\n") as fh:
                yield fh
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    else:
        yield dest


def canonical_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2) + 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


def emit_rows(
    columns: Sequence[str], rows: Iterable[Sequence[Any]], destination: Destination = None
) -> None:
    """Table with a header line, rows kept in the given order."""
    with _open(destination) as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def emit_csv(points: np.ndarray, destination: Destination = None, header: bool = False) -> None:
    """One ``x,y`` line per point, sorted by x then y."""
    with _open(destination) as fh:
        if header:
            fh.write("x,y\n")
        for x, y in canonical_points(points):
            fh.write(f"{fmt(x)},{fmt(y)}\n")


def _dump(obj: Any) -> str:
    if isinstance(obj, Mapping):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{_dump(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_document(obj: Any, params: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Map a result object onto the stable JSON schema."""
    doc: dict[str, Any] = {"params": dict(params or {})}
    if isinstance(obj, AttractorCover):
        doc.update(
            kind=f"cover-{obj.kind}",
            depth=obj.depth,
            word_length=obj.word_length,
            polygons=obj.polygons.tolist(),
        )
    elif isinstance(obj, Polygon2):
        doc.update(kind="polygon", degenerate=obj.degenerate, polygons=[obj.vertices.tolist()])
    elif isinstance(obj, (list, tuple)) and all(isinstance(p, Polygon2) for p in obj):
        doc.update(kind="polygons", polygons=[p.vertices.tolist() for p in obj])
    else:
        doc.update(kind="points", points=canonical_points(obj).tolist())
    return doc


def emit_document(doc: Mapping[str, Any], destination: Destination = None) -> None:
    """Write an arbitrary mapping with sorted keys and 17-digit floats."""
    with _open(destination) as fh:
        fh.write(_dump(doc) + "\n")


def emit_json(obj: Any, destination: Destination = None, params: Mapping[str, Any] | None = None) -> None:
    emit_document(to_document(obj, params), destination)


def dumps(obj: Any, params: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    emit_json(obj, buf, params)
    return buf.getvalue()


def load_json(source: str | Path | TextIO) -> dict[str, Any]:
    """Parse a document written by :func:`emit_json`; arrays come back as numpy."""
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = json.load(source)
    if "points" in doc:
        doc["points"] = np.asarray(doc["points"], dtype=float).reshape(-1, 2)
    if "polygons" in doc:
        doc["polygons"] = [np.asarray(p, dtype=float).reshape(-1, 2) for p in doc["polygons"]]
    return doc


def emit_svg(
    polygons: Sequence[Polygon2 | np.ndarray],
    destination: Destination = None,
    metadata: Mapping[str, Any] | None = None,
    fill: str = "#3b6ea5",
) -> None:
    """Standalone SVG with one filled ``<path>`` per polygon (y axis pointing up)."""
    rings = [np.asarray(p.vertices if isinstance(p, Polygon2) else p, dtype=float) for p in polygons]
    if rings:
        allpts = np.concatenate(rings)
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    span = np.maximum(hi - lo, 1e-12)
    pad = 0.05 * span
    x0, y0 = lo[0] - pad[0], -(hi[1] + pad[1])
    w, h = span[0] + 2 * pad[0], span[1] + 2 * pad[1]
    stroke = fmt(0.002 * max(w, h))

    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    meta = ", ".join(f"{k}={v}" for k, v in sorted((metadata or {}).items()))
    lines.append(f"<!-- fibsnake: {meta.replace('--', '- -')} -->")
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{fmt(x0)} {fmt(y0)} {fmt(w)} {fmt(h)}">'
    )
    for ring in rings:
        cmds = " ".join(
            f"{'M' if i == 0 else 'L'}{fmt(x)},{fmt(-y)}" for i, (x, y) in enumerate(ring)
        )
        lines.append(
            f'<path d="{cmds} Z" fill="{fill}" fill-opacity="0.6" stroke="#1d3557" '
            f'stroke-width="{stroke}"/>'
        )
    lines.append("</svg>")
    with _open(destination) as fh:
        fh.write("\n".join(lines) + "\n")
