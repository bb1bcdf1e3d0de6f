"""Text input format and deterministic CSV/JSON output.

Input files list vertices with their two filtering values, then simplices
by vertex index::

    # comment
    v 0.0 1.5
    v 1.0 -0.5
    v 2.0 0.25
    s 0 1
    s 0 1 2

Vertex ``i`` is the i-th ``v`` line. Numbers are written with 17 significant
digits, so serializing and parsing again reproduces the input exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .complex import Bifiltration, SimplicialComplex, build_complex
from .errors import ComplexError, ParseError
from .persistence import PersistenceDiagram


def fmt(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def parse_text(text: str, strict: bool = True):
    """(K, f) from the v/s text format; errors name the offending line."""
    values, simplices = [], []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag == "v":
            if len(rest) != 2:
                raise ParseError(f"vertex line needs two values, got {len(rest)}", lineno)
            try:
                vals = [float(x) for x in rest]
            except ValueError:
                raise ParseError(f"cannot read vertex values {rest}", lineno) from None
            if not all(math.isfinite(x) for x in vals):
                raise ParseError("vertex values must be finite", lineno)
            values.append(vals)
        elif tag == "s":
            if not rest:
                raise ParseError("simplex line lists no vertices", lineno)
            try:
                simplices.append((tuple(int(x) for x in rest), lineno))
            except ValueError:
                raise ParseError(f"vertex indices must be integers: {rest}", lineno) from None
        else:
            raise ParseError(f"unknown record type {tag!r}", lineno)
    if not values:
        raise ParseError("no vertices", last_line or None)
    n = len(values)
    for s, lineno in simplices:
        bad = [i for i in s if not 0 <= i < n]
        if bad:
            raise ParseError(f"vertex index {bad[0]} out of range (0..{n - 1})", lineno)
    listed = [s for s, _ in simplices if len(s) > 1]
    try:
        K = build_complex([(i,) for i in range(n)] + listed, n, strict=strict)
    except ComplexError as e:
        line = None
        for s, lineno in simplices:
            if str(tuple(sorted(s))) in str(e) or str(s) in str(e):
                line = lineno
                break
        raise ParseError(str(e), line) from None
    return K, Bifiltration(np.array(values, dtype=float))


def read_input(path, strict: bool = True):
    return parse_text(Path(path).read_text(), strict)


def serialize(K: SimplicialComplex, f: Bifiltration) -> str:
    lines = [f"v {fmt(u)} {fmt(v)}" for u, v in f.values]
    for d in range(1, K.dim + 1):
        for s in K.simplices[d]:
            lines.append("s " + " ".join(str(i) for i in s))
    return "\n".join(lines) + "\n"


def write_input(path, K, f):
    Path(path).write_text(serialize(K, f))


# ----------------------------------------------------------------- json


def jsonable(obj):
    """Plain JSON types; infinities and NaN become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    Path(path).write_text(buf.getvalue())


# ----------------------------------------------------------------- diagrams


def diagram_rows(D: PersistenceDiagram):
    """(degree, birth, death, multiplicity) with repeated points merged."""
    rows = []
    for c in D.cornerpoints():
        rows.append((c.degree, float(c.birth), float(c.death), c.multiplicity))
    return rows


def diagram_json(D: PersistenceDiagram) -> dict:
    return {
        str(d): {
            "proper": [[float(u), float(v)] for u, v in D.proper(d)],
            "essential": [float(u) for u in D.essential(d)],
        }
        for d in D.degrees
    }


def write_diagram(out: Path, D: PersistenceDiagram, stem: str = "diagram"):
    write_csv(out / f"{stem}.csv", ["degree", "birth", "death", "multiplicity"], diagram_rows(D))
    write_json(out / f"{stem}.json", diagram_json(D))


def singular_rows(S):
    return [(s.which, s.center[0], s.center[1], s.radius, s.separation) for s in S]


def write_singular(out: Path, S, stem: str = "singular"):
    write_csv(out / f"{stem}.csv", ["function", "a", "b", "radius", "separation"], singular_rows(S))
    write_json(out / f"{stem}.json", {
        "pairs": [{"function": w, "center": [a, b], "radius": r, "separation": s} for w, a, b, r, s in singular_rows(S)],
        "min_separation": S.min_separation,
        "warnings": S.warnings,
    })


def write_tracks(path, rows):
    write_csv(path, ["degree", "label", "tau", "a", "b", "birth", "death", "on_diagonal"],
              [(d, l, t, a, b, u, v, int(on)) for d, l, t, a, b, u, v, on in rows])
