"""Ring spec documents (YAML) and JSON analysis reports.

A spec names or tabulates each diagonal ring, each coordinate bimodule and
each proper product table. Indices in documents are 1-based.

    format_version: 1
    name: cycle(Z/4,2)
    order: 2
    rings: [Z/4, Z/4]
    bimodules:
      - [ring(1), ring(1)]
      - [ring(2), ring(2)]
    products: {}

Ring entries: a generator name, or a mapping with ``add``, ``mul``, ``zero``,
``one`` (and optional ``labels``). Bimodule entries: ``zero``, ``ring(i)``,
``residue(i)``, or a mapping with ``add``, ``left``, ``right``, ``zero``.
Product keys are "i,j,k" for i != j != k; values are ``zero``, ``action``,
``residue-mult`` or an explicit table. Every proper triple with nonzero
B_ij, B_jk and B_ik must be present.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .constructions import ring_from_name
from .errors import FormalRingError, ParseError, UnresolvedReference
from .formal import FormalMatrixRing, build
from .modules import FiniteBimodule, regular_bimodule, residue_bimodule, validate_bimodule, zero_bimodule
from .rings import FiniteRing, residue_field, validate_ring

FORMAL_VERSION = 1
REPORT_SCHEMA_VERSION = 1


# ------------------------------------------------------------ located YAML

class _LDict(dict):
    line: int = 0
    key_lines: dict


class _LList(list):
    line: int = 0
    item_lines: list


_LOADER = yaml.SafeLoader("")


def _located(node) -> Any:
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = _LDict()
        out.line, out.key_lines = line, {}
        for k, v in node.value:
            key = _LOADER.construct_object(k, deep=True)
            out[key] = _located(v)
            out.key_lines[key] = k.start_mark.line + 1
        return out
    if isinstance(node, yaml.SequenceNode):
        if all(isinstance(v, yaml.ScalarNode) for v in node.value):
            out = _LList(_LOADER.construct_object(v) for v in node.value)
        else:
            out = _LList(_located(v) for v in node.value)
        out.line = line
        out.item_lines = [v.start_mark.line + 1 for v in node.value]
        return out
    return _LOADER.construct_object(node)


def _line(obj, default=None):
    return getattr(obj, "line", default)


def _load(text: str):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(mark.line + 1 if mark else None, f"malformed document: {getattr(exc, 'problem', exc)}")
    if node is None:
        raise ParseError(1, "empty document")
    return _located(node)


# ------------------------------------------------------------------- parse

@dataclass
class RingSpecDocument:
    format_version: int
    order: int
    rings: list
    bimodules: list
    products: dict
    name: str | None = None
    lines: dict = field(default_factory=dict)


def _require(doc, key, line):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(line, f"missing required field '{key}'")
    return doc[key]


def _table(value, shape, what, line):
    try:
        arr = np.asarray(value, dtype=np.int64)
    except (TypeError, ValueError):
        raise ParseError(line, f"{what}: table must be a rectangular array of integers")
    if arr.shape != shape:
        raise ParseError(line, f"{what}: expected shape {shape}, got {arr.shape}")
    return arr


def _parse_ring(entry, i, line) -> FiniteRing:
    if isinstance(entry, str):
        try:
            return ring_from_name(entry)
        except UnresolvedReference:
            raise UnresolvedReference(entry, line)
    if isinstance(entry, dict):
        line = _line(entry, line)
        add = _require(entry, "add", line)
        n = len(add) if isinstance(add, list) else 0
        if n == 0:
            raise ParseError(line, f"ring {i + 1}: empty addition table")
        add = _table(add, (n, n), f"ring {i + 1} add", line)
        mul = _table(_require(entry, "mul", line), (n, n), f"ring {i + 1} mul", line)
        return validate_ring(add, mul, int(entry.get("zero", 0)), int(entry.get("one", 1)),
                             labels=entry.get("labels"), name=entry.get("name"))
    raise ParseError(line, f"ring {i + 1}: expected a generator name or a table mapping")


_REF = re.compile(r"(ring|residue)\((\d+)\)")


def _parse_bimodule(entry, rings, i, j, line) -> FiniteBimodule | None:
    L, R = rings[i], rings[j]
    if isinstance(entry, str):
        s = entry.replace(" ", "")
        if s == "zero":
            if i == j:
                raise ParseError(line, f"slot ({i + 1},{i + 1}) must be the ring itself")
            return None
        m = _REF.fullmatch(s)
        if not m:
            raise UnresolvedReference(entry, line)
        k = int(m.group(2)) - 1
        if k not in (i, j):
            raise ParseError(line, f"slot ({i + 1},{j + 1}): '{entry}' must refer to ring {i + 1} or {j + 1}")
        if m.group(1) == "ring":
            if not L.same_tables(R):
                raise ParseError(line, f"slot ({i + 1},{j + 1}): ring(k) needs equal diagonal rings")
            return regular_bimodule(rings[k])
        try:
            return residue_bimodule(L, R)
        except ValueError as exc:
            raise ParseError(line, f"slot ({i + 1},{j + 1}): {exc}")
    if isinstance(entry, dict):
        line = _line(entry, line)
        add = _require(entry, "add", line)
        n = len(add) if isinstance(add, list) else 0
        if n == 0:
            raise ParseError(line, f"slot ({i + 1},{j + 1}): empty addition table")
        add = _table(add, (n, n), f"slot ({i + 1},{j + 1}) add", line)
        left = _table(_require(entry, "left", line), (L.size, n), f"slot ({i + 1},{j + 1}) left", line)
        right = _table(_require(entry, "right", line), (n, R.size), f"slot ({i + 1},{j + 1}) right", line)
        return validate_bimodule(L, R, add, left, right, int(entry.get("zero", 0)), entry.get("labels"),
                                 name=entry.get("name"))
    raise ParseError(line, f"slot ({i + 1},{j + 1}): expected a name or a table mapping")


def _product_table(entry, grid, i, j, k, line):
    A, B, C = grid[i][j], grid[j][k], grid[i][k]
    if isinstance(entry, str):
        s = entry.replace(" ", "")
        if s == "zero":
            return np.full((A.size, B.size), C.zero, dtype=np.int64)
        if s == "action":
            if not (A.name == B.name == C.name == "ring" and A.left_ring.same_tables(B.left_ring)
                    and A.left_ring.same_tables(C.left_ring)):
                raise ParseError(line, f"product ({i + 1},{j + 1},{k + 1}): 'action' needs ring bimodules in all three slots")
            return A.left_ring.mul
        if s == "residue-mult":
            if not (A.name == B.name == C.name == "residue"):
                raise ParseError(line, f"product ({i + 1},{j + 1},{k + 1}): 'residue-mult' needs residue bimodules in all three slots")
            return residue_field(A.left_ring).residue_field.mul
        raise UnresolvedReference(entry, line)
    return _table(entry, (A.size, B.size), f"product ({i + 1},{j + 1},{k + 1})", line)


def parse_spec(text: str) -> RingSpecDocument:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise ParseError(1, "top level must be a mapping")
    version = _require(doc, "format_version", doc.line)
    if version != FORMAL_VERSION:
        raise ParseError(doc.key_lines.get("format_version"), f"unsupported format_version {version!r}")
    n = _require(doc, "order", doc.line)
    if not isinstance(n, int) or n < 1:
        raise ParseError(doc.key_lines.get("order"), "order must be a positive integer")
    rings = _require(doc, "rings", doc.line)
    if not isinstance(rings, list) or len(rings) != n:
        raise ParseError(_line(rings, doc.key_lines.get("rings")), f"expected {n} ring entries")
    bims = _require(doc, "bimodules", doc.line)
    if not isinstance(bims, list) or len(bims) != n:
        raise ParseError(_line(bims, doc.key_lines.get("bimodules")), f"expected {n} bimodule rows")
    for r, row in enumerate(bims):
        if not isinstance(row, list) or len(row) != n:
            rl = bims.item_lines[r] if hasattr(bims, "item_lines") else None
            raise ParseError(_line(row, rl), f"bimodule row {r + 1} must have {n} entries")
    products = doc.get("products", {}) or {}
    if not isinstance(products, dict):
        raise ParseError(doc.key_lines.get("products"), "products must be a mapping")
    return RingSpecDocument(version, n, rings, bims, products, doc.get("name"),
                            lines={"doc": doc, "rings": rings, "bimodules": bims, "products": products})


def _item_line(container, idx, default=None):
    lines = getattr(container, "item_lines", None)
    return lines[idx] if lines and idx < len(lines) else default


def build_from_document(doc: RingSpecDocument, check: bool = True) -> FormalMatrixRing:
    n = doc.order
    rings = [_parse_ring(e, i, _item_line(doc.rings, i)) for i, e in enumerate(doc.rings)]
    grid = [[None] * n for _ in range(n)]
    for i in range(n):
        row = doc.bimodules[i]
        for j in range(n):
            grid[i][j] = _parse_bimodule(row[j], rings, i, j, _item_line(row, j, _line(row)))
    full = [[grid[i][j] or (regular_bimodule(rings[i]) if i == j else zero_bimodule(rings[i], rings[j]))
             for j in range(n)] for i in range(n)]
    key_lines = getattr(doc.products, "key_lines", {})
    prods, seen = {}, set()
    for key, entry in doc.products.items():
        line = key_lines.get(key)
        try:
            i, j, k = (int(t) - 1 for t in str(key).split(","))
        except ValueError:
            raise ParseError(line, f"product key {key!r} must be 'i,j,k'")
        if not all(0 <= t < n for t in (i, j, k)) or i == j or j == k:
            raise ParseError(line, f"product key {key!r} is not a proper triple of 1..{n}")
        if (i, j, k) in seen:
            raise ParseError(line, f"duplicate product {key!r}")
        seen.add((i, j, k))
        prods[(i, j, k)] = _product_table(entry, full, i, j, k, _line(entry, line))
    for i, j, k in itertools.product(range(n), repeat=3):
        if i != j and j != k and (i, j, k) not in seen and min(full[i][j].size, full[j][k].size, full[i][k].size) > 1:
            raise ParseError(_line(doc.products, doc.lines["doc"].line), f"missing product table for ({i + 1},{j + 1},{k + 1})")
    return build(rings, grid, prods, name=doc.name, check=check)


def load_ring(text: str, check: bool = True) -> FormalMatrixRing:
    return build_from_document(parse_spec(text), check=check)


def load_ring_file(path, check: bool = True) -> FormalMatrixRing:
    with open(path, encoding="utf-8") as fh:
        return load_ring(fh.read(), check=check)


# -------------------------------------------------------------------- emit

def _rows(a) -> list:
    return np.asarray(a).astype(int).tolist()


def _emit_ring(R: FiniteRing):
    if R.name:
        try:
            if ring_from_name(R.name).same_tables(R):
                return R.name
        except FormalRingError:
            pass
    d = {"add": _rows(R.add), "mul": _rows(R.mul), "zero": int(R.zero), "one": int(R.one)}
    if R.name:
        d = {"name": R.name, **d}
    return d


def _emit_bimodule(B: FiniteBimodule, rings, i, j):
    if i == j:
        return f"ring({i + 1})"
    if B.size == 1:
        return "zero"
    if rings[i].same_tables(rings[j]) and B.same_tables(regular_bimodule(rings[i])):
        return f"ring({i + 1})"
    try:
        if B.same_tables(residue_bimodule(rings[i], rings[j])):
            return f"residue({i + 1})"
    except (ValueError, FormalRingError):
        pass
    d = {"add": _rows(B.add), "left": _rows(B.left), "right": _rows(B.right), "zero": int(B.zero)}
    if B.name:
        d = {"name": B.name, **d}
    return d


def emit_spec(R: FormalMatrixRing) -> str:
    n = R.order
    rings = [_emit_ring(r) for r in R.rings]
    bims = [[_emit_bimodule(R.bimodules[i][j], R.rings, i, j) for j in range(n)] for i in range(n)]
    prods = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        if i == j or j == k:
            continue
        A, B, C = R.bimodules[i][j], R.bimodules[j][k], R.bimodules[i][k]
        if min(A.size, B.size, C.size) == 1:
            continue
        t = np.asarray(R.products[(i, j, k)])
        key = f"{i + 1},{j + 1},{k + 1}"
        if (t == C.zero).all():
            prods[key] = "zero"
        else:
            prods[key] = _shorthand_product(t, A, B, C) or _rows(t)
    doc = {"format_version": FORMAL_VERSION}
    if R.name:
        doc["name"] = R.name
    doc.update({"order": n, "rings": rings, "bimodules": bims, "products": prods})
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=120)


def _shorthand_product(t, A, B, C) -> str | None:
    if A.name == B.name == C.name == "ring" and A.left_ring.same_tables(C.left_ring) \
            and A.left_ring.same_tables(B.left_ring) and np.array_equal(t, A.left_ring.mul):
        return "action"
    if A.name == B.name == C.name == "residue":
        K = residue_field(A.left_ring).residue_field
        if t.shape == K.mul.shape and np.array_equal(t, K.mul):
            return "residue-mult"
    return None


# ------------------------------------------------------------------ reports

def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def report_document(kind: str, input_text: str | None, body: dict, meta: dict | None = None) -> dict:
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "kind": kind}
    if input_text is not None:
        doc["input_sha256"] = sha256_text(input_text)
    doc.update(body)
    if meta:
        doc["meta"] = meta
    return doc


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def dumps_report(doc: dict) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
