"""Problem files, run traces and run summaries.

Problem file layout (UTF-8, one record per line)::

    {"format": "dualproj-problem", "version": 1, "I": 2, "m": 1, "n": 4, "metadata": {...}}
    b,0.5
    block,0,simplex_eq,2,
    c,-1.0,-0.5
    a,0,0,1.0
    end
    block,1,boxcut_eq,3,2
    ...
    end

``a`` lines are ``row,col,value`` triplets of the block's column slice;
general hulls list one vertex per ``v`` line.  Floats are written with
``repr`` (shortest round-trip decimal) and read with ``float``, so a
problem survives a write/read cycle bit for bit.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ParseError, ValidationError
from .polytope import Kind, PolytopeSpec
from .problem import Block, Problem, validate_problem

FORMAT = "dualproj-problem"
VERSION = 1

TRACE_COLUMNS = ("iter", "stage", "gamma", "eps", "g_gamma", "g0", "grad_norm", "step", "mu",
                 "vertex_frac", "Q", "wall_ms")
_INT_COLUMNS = ("iter", "stage")


def _f(x):
    return repr(float(x))


def dumps_problem(p: Problem) -> str:
    header = {"format": FORMAT, "version": VERSION, "I": p.I, "m": p.m, "n": p.n,
              "metadata": p.metadata or {}}
    lines = [json.dumps(header, sort_keys=True, default=_json_default),
             ",".join(["b"] + [_f(v) for v in p.b])]
    for blk in p.blocks:
        s = blk.spec
        delta = "" if s.delta is None else str(int(s.delta))
        lines.append(f"block,{blk.id},{s.kind.value},{blk.K},{delta}")
        lines.append(",".join(["c"] + [_f(v) for v in blk.c]))
        rows, cols, vals = blk.triplets()
        lines.extend(f"a,{r},{c},{_f(v)}" for r, c, v in zip(rows, cols, vals))
        if s.kind is Kind.GENERAL:
            lines.extend(",".join(["v"] + [_f(v) for v in vert]) for vert in s.vertices)
        lines.append("end")
    return "\n".join(lines) + "\n"


def write_problem(p: Problem, path):
    Path(path).write_text(dumps_problem(p), encoding="utf-8")


def _floats(fields, lineno, what):
    try:
        return [float(v) for v in fields]
    except ValueError as exc:
        raise ParseError(f"bad number in {what}: {exc}", lineno, what) from None


def loads_problem(text, validate=True) -> Problem:
    """Parse the text of a problem file; see the module docstring."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1, "header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"header is not JSON: {exc.msg}", 1, "header") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise ParseError(f"header must declare format {FORMAT!r}", 1, "format")
    if header.get("version") != VERSION:
        raise ParseError(f"unsupported version {header.get('version')!r}", 1, "version")
    b = None
    blocks = []
    cur = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        tag = fields[0]
        if tag == "b":
            if b is not None:
                raise ParseError("duplicate b record", lineno, "b")
            b = np.array(_floats(fields[1:], lineno, "b"))
        elif tag == "block":
            if cur is not None:
                raise ParseError("block opened before previous 'end'", lineno, "block")
            if len(fields) != 5:
                raise ParseError("block record needs id,kind,K,delta", lineno, "block")
            try:
                bid, K = int(fields[1]), int(fields[3])
                kind = Kind(fields[2])
                delta = int(fields[4]) if fields[4] else None
            except ValueError as exc:
                raise ParseError(str(exc), lineno, "block") from None
            cur = {"id": bid, "kind": kind, "K": K, "delta": delta, "c": None,
                   "rows": [], "cols": [], "vals": [], "verts": [], "line": lineno}
        elif tag in ("c", "a", "v", "end"):
            if cur is None:
                raise ParseError(f"{tag!r} record outside a block", lineno, tag)
            if tag == "c":
                cur["c"] = _floats(fields[1:], lineno, "c")
            elif tag == "a":
                if len(fields) != 4:
                    raise ParseError("a record needs row,col,value", lineno, "a")
                try:
                    cur["rows"].append(int(fields[1]))
                    cur["cols"].append(int(fields[2]))
                except ValueError as exc:
                    raise ParseError(str(exc), lineno, "a") from None
                cur["vals"].append(_floats(fields[3:], lineno, "a")[0])
            elif tag == "v":
                cur["verts"].append(_floats(fields[1:], lineno, "v"))
            else:
                blocks.append(_finish_block(cur, header.get("m"), lineno))
                cur = None
        else:
            raise ParseError(f"unknown record {tag!r}", lineno, "tag")
    if cur is not None:
        raise ParseError("missing 'end' for last block", len(lines), "end")
    if b is None:
        raise ParseError("missing b record", len(lines), "b")
    p = Problem(blocks, b, header.get("metadata") or None)
    if header.get("m") not in (None, p.m):
        raise ParseError(f"header m={header['m']} but b has {p.m} entries", 1, "m")
    if validate:
        rep = validate_problem(p)
        if not rep.ok:
            raise ValidationError(rep.violations)
    return p


def _finish_block(cur, m, lineno):
    K = cur["K"]
    if cur["c"] is None:
        raise ParseError(f"block {cur['id']} has no c record", lineno, "c")
    if m is None:
        m = (max(cur["rows"]) + 1) if cur["rows"] else 0
    if any(r < 0 or r >= m for r in cur["rows"]) or any(c < 0 or c >= K for c in cur["cols"]):
        raise ParseError(f"block {cur['id']}: triplet index out of range", lineno, "a")
    A = sp.csc_matrix((cur["vals"], (cur["rows"], cur["cols"])), shape=(m, K))
    verts = np.array(cur["verts"]) if cur["verts"] else None
    if cur["kind"] is Kind.GENERAL and verts is None:
        raise ParseError(f"block {cur['id']}: general hull without v records", lineno, "v")
    spec = PolytopeSpec(cur["kind"], cur["delta"], verts)
    return Block(cur["id"], np.array(cur["c"]), A, spec)


def parse_problem(path, validate=True) -> Problem:
    """Read and validate a problem file."""
    return loads_problem(Path(path).read_text(encoding="utf-8"), validate)


# ---------------------------------------------------------------------------
# traces and summaries
# ---------------------------------------------------------------------------

def write_trace(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in rows:
            w.writerow([str(int(r[k])) if k in _INT_COLUMNS else _f(r[k]) for k in TRACE_COLUMNS])


def read_trace(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        head = next(reader, None)
        if head is None or tuple(head) != TRACE_COLUMNS:
            raise ParseError("trace header does not match the expected columns", 1, "header")
        out = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(TRACE_COLUMNS):
                raise ParseError(f"expected {len(TRACE_COLUMNS)} fields", lineno, "row")
            row = {}
            for k, v in zip(TRACE_COLUMNS, rec):
                try:
                    row[k] = int(v) if k in _INT_COLUMNS else float(v)
                except ValueError:
                    raise ParseError(f"bad value {v!r}", lineno, k) from None
            out.append(row)
    return out


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats by ``None`` so the output is strict JSON."""
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return _clean(o.tolist())
    if isinstance(o, (float, np.floating)) and not math.isfinite(o):
        return None
    return o


def write_summary(summary, path):
    Path(path).write_text(json.dumps(_clean(summary), indent=2, sort_keys=True,
                                     default=_json_default) + "\n", encoding="utf-8")


def read_summary(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
