"""The query-predicate language: parse, canonicalize, typecheck, evaluate, select.

A predicate is a tree of field predicates composed with and/or/not. The wire
grammar is JSON: a leaf is ``{"field": name, <operator>: literal}`` with
exactly one operator key out of equal/lt/lte/gt/gte/range/oneOf/valid, and a
composition is ``{"and": [...]}`` / ``{"or": [...]}`` / ``{"not": {...}}``.
Parsing is strict: unknown keys are rejected so malformed model output fails
loudly instead of silently matching nothing.

Evaluation is total. Comparisons against null cells are false; ``valid``
tests null-ness explicitly; ``and`` of nothing is true and ``or`` of nothing
is false.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .dataset import (
    Dataset,
    DataValue,
    FieldSpec,
    NominalExtent,
    QuantitativeExtent,
    TemporalExtent,
    Timestamp,
    parse_temporal,
)
from .diagnostics import Diagnostic, DiagnosticCode
from .errors import (
    MissingFieldError,
    MissingOperatorError,
    MultipleOperatorsError,
    PredicateSyntaxError,
    UnknownFieldError,
    UnknownOperatorError,
)

OPERATORS = ("equal", "lt", "lte", "gt", "gte", "range", "oneOf", "valid")

# JSON literal as it appears in predicate source; temporal meaning is
# resolved against the field's measure at typecheck/evaluate time.
Literal = Union[int, float, str, bool, list]


@dataclass(frozen=True)
class Leaf:
    field: str
    op: str
    value: Literal


@dataclass(frozen=True)
class And:
    items: tuple["Predicate", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Predicate", ...]


@dataclass(frozen=True)
class Not:
    inner: "Predicate"


Predicate = Union[Leaf, And, Or, Not]


@dataclass(frozen=True)
class Selection:
    dataset_id: str
    row_indices: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.row_indices)


# --- parsing ---

def _parse_node(node: object) -> Predicate:
    if not isinstance(node, dict):
        raise PredicateSyntaxError(f"predicate node must be an object, got {type(node).__name__}")
    keys = list(node.keys())
    if "and" in node or "or" in node or "not" in node:
        comp = "and" if "and" in node else ("or" if "or" in node else "not")
        if len(keys) != 1:
            extra = [k for k in keys if k != comp]
            raise UnknownOperatorError(f"composition node carries unexpected keys {extra}")
        value = node[comp]
        if comp == "not":
            return Not(_parse_node(value))
        if not isinstance(value, list):
            raise PredicateSyntaxError(f'"{comp}" must hold an array')
        items = tuple(_parse_node(child) for child in value)
        return And(items) if comp == "and" else Or(items)

    ops = [k for k in keys if k in OPERATORS]
    unknown = [k for k in keys if k not in OPERATORS and k != "field"]
    if unknown:
        raise UnknownOperatorError(f"unknown predicate keys {unknown}")
    if "field" not in node:
        raise MissingFieldError(f'leaf is missing "field" (keys: {keys})')
    if not isinstance(node["field"], str):
        raise PredicateSyntaxError('"field" must be a string')
    if len(ops) == 0:
        raise MissingOperatorError(f'leaf for field {node["field"]!r} has no operator')
    if len(ops) > 1:
        raise MultipleOperatorsError(f"leaf carries multiple operators {ops}")

    op = ops[0]
    value = node[op]
    if op == "range":
        if not (isinstance(value, list) and len(value) == 2):
            raise PredicateSyntaxError('"range" must be a two-element array')
        if not all(isinstance(v, (int, float, str)) and not isinstance(v, bool) for v in value):
            raise PredicateSyntaxError('"range" bounds must be numbers or strings')
    elif op == "oneOf":
        if not isinstance(value, list) or not value:
            raise PredicateSyntaxError('"oneOf" must be a non-empty array')
        if not all(isinstance(v, (int, float, str)) and not isinstance(v, bool) for v in value):
            raise PredicateSyntaxError('"oneOf" items must be numbers or strings')
    elif op == "valid":
        if not isinstance(value, bool):
            raise PredicateSyntaxError('"valid" takes a boolean')
    else:
        if not isinstance(value, (int, float, str)) or isinstance(value, bool):
            raise PredicateSyntaxError(f'"{op}" takes a number or string literal')
    return Leaf(node["field"], op, _freeze(value))


def _freeze(value: Literal) -> Literal:
    return tuple(value) if isinstance(value, list) else value


def parse_predicate(text: str) -> Predicate:
    """Parse the JSON wire form; raises a PredicateParseError subclass on any defect."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PredicateSyntaxError(f"bad JSON: {exc}") from exc
    return _parse_node(data)


def parse_predicate_obj(data: object) -> Predicate:
    """Parse an already-decoded JSON value (as produced inside LLM responses)."""
    return _parse_node(data)


# --- canonical serialization ---

def to_jsonable(p: Predicate) -> dict:
    """Ordered-dict form whose key order matches the canonical wire format."""
    if isinstance(p, Leaf):
        return {"field": p.field, p.op: list(p.value) if isinstance(p.value, tuple) else p.value}
    if isinstance(p, And):
        return {"and": [to_jsonable(c) for c in p.items]}
    if isinstance(p, Or):
        return {"or": [to_jsonable(c) for c in p.items]}
    return {"not": to_jsonable(p.inner)}


def canonical_json(p: Predicate) -> str:
    """Deterministic bytes: fixed key order, no insignificant whitespace,
    numbers in shortest round-trip form (ints stay ints, floats use repr)."""
    return json.dumps(to_jsonable(p), separators=(",", ":"), ensure_ascii=False)


# --- typecheck ---

def referenced_fields(p: Predicate) -> set[str]:
    if isinstance(p, Leaf):
        return {p.field}
    if isinstance(p, Not):
        return referenced_fields(p.inner)
    out: set[str] = set()
    for child in p.items:
        out |= referenced_fields(child)
    return out


def _literal_kind(value: Literal) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    return "text"


def _temporal_literal(value: Literal) -> Optional[Timestamp]:
    """Coerce a predicate literal to a timestamp; bare years always allowed
    because the field is already known temporal."""
    if isinstance(value, bool):
        return None
    if isinstance(value, str):
        return parse_temporal(value, allow_bare_year=True)
    if isinstance(value, (int, float)) and float(value).is_integer() and 1000 <= value <= 2999:
        return parse_temporal(str(int(value)), allow_bare_year=True)
    return None


def _check_leaf(leaf: Leaf, spec: FieldSpec, diags: list[Diagnostic]) -> None:
    def mismatch(message: str) -> None:
        diags.append(Diagnostic(DiagnosticCode.TYPE_MISMATCH, "error", message))

    if leaf.op == "valid":
        return

    if spec.measure == "nominal":
        if leaf.op in ("lt", "lte", "gt", "gte", "range"):
            mismatch(
                f'operator "{leaf.op}" is not valid on nominal field "{leaf.field}"'
            )
            return
        values = leaf.value if leaf.op == "oneOf" else (leaf.value,)
        for v in values:
            if _literal_kind(v) != "text":
                mismatch(
                    f'field "{leaf.field}" is nominal but literal {v!r} is not text'
                )
        return

    if spec.measure == "quantitative":
        bounds = leaf.value if leaf.op in ("range", "oneOf") else (leaf.value,)
        for v in bounds:
            if _literal_kind(v) != "number":
                mismatch(
                    f'field "{leaf.field}" is quantitative but literal {v!r} is not a number'
                )
        if leaf.op == "range" and all(_literal_kind(v) == "number" for v in leaf.value):
            lo, hi = leaf.value
            if lo > hi:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.MALFORMED_RANGE,
                        "error",
                        f'range bounds [{_fmt(lo)}, {_fmt(hi)}] on field "{leaf.field}" '
                        f"are out of order: lower bound exceeds upper bound",
                    )
                )
        return

    # temporal
    bounds = leaf.value if leaf.op in ("range", "oneOf") else (leaf.value,)
    parsed = [_temporal_literal(v) for v in bounds]
    for v, ts in zip(bounds, parsed):
        if ts is None:
            mismatch(
                f'field "{leaf.field}" is temporal but literal {v!r} does not parse as a date'
            )
    if leaf.op == "range" and all(ts is not None for ts in parsed):
        lo, hi = parsed
        if lo.epoch_ms > hi.epoch_ms:
            diags.append(
                Diagnostic(
                    DiagnosticCode.MALFORMED_RANGE,
                    "error",
                    f'range bounds [{leaf.value[0]!r}, {leaf.value[1]!r}] on field '
                    f'"{leaf.field}" are out of order: lower bound exceeds upper bound',
                )
            )


def typecheck(p: Predicate, fields: Sequence[FieldSpec]) -> list[Diagnostic]:
    """Static diagnostics: UnknownField, TypeMismatch, MalformedRange.

    An empty list means the predicate is well-typed for the schema.
    """
    by_name = {f.name: f for f in fields}
    diags: list[Diagnostic] = []

    def walk(node: Predicate) -> None:
        if isinstance(node, Leaf):
            spec = by_name.get(node.field)
            if spec is None:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.UNKNOWN_FIELD,
                        "error",
                        f'predicate references unknown field "{node.field}"; '
                        f"dataset fields are: {', '.join(by_name) or '(none)'}",
                    )
                )
                return
            _check_leaf(node, spec, diags)
        elif isinstance(node, Not):
            walk(node.inner)
        else:
            for child in node.items:
                walk(child)

    walk(p)
    return diags


# --- evaluation ---

def _coerce_pair(cell: DataValue, literal: Literal):
    """Align a literal with a cell for comparison; None means incomparable."""
    if isinstance(cell, Timestamp):
        ts = _temporal_literal(literal)
        return None if ts is None else (cell.epoch_ms, ts.epoch_ms)
    if isinstance(cell, float):
        if isinstance(literal, bool) or not isinstance(literal, (int, float)):
            return None
        return (cell, float(literal))
    if isinstance(cell, str):
        if not isinstance(literal, str):
            return None
        return (cell, literal)
    return None


def _eval_leaf(leaf: Leaf, record: Mapping[str, DataValue]) -> bool:
    cell = record.get(leaf.field)
    if leaf.op == "valid":
        return (cell is not None) if leaf.value else (cell is None)
    if cell is None:
        return False
    if leaf.op == "equal":
        pair = _coerce_pair(cell, leaf.value)
        return pair is not None and pair[0] == pair[1]
    if leaf.op == "oneOf":
        for candidate in leaf.value:
            pair = _coerce_pair(cell, candidate)
            if pair is not None and pair[0] == pair[1]:
                return True
        return False
    if leaf.op == "range":
        if isinstance(cell, str):
            return False  # no ordering on nominal cells
        lo = _coerce_pair(cell, leaf.value[0])
        hi = _coerce_pair(cell, leaf.value[1])
        return lo is not None and hi is not None and lo[1] <= lo[0] and hi[0] <= hi[1]
    if isinstance(cell, str):
        return False
    pair = _coerce_pair(cell, leaf.value)
    if pair is None:
        return False
    a, b = pair
    if leaf.op == "lt":
        return a < b
    if leaf.op == "lte":
        return a <= b
    if leaf.op == "gt":
        return a > b
    return a >= b  # gte


def evaluate(p: Predicate, record: Mapping[str, DataValue]) -> bool:
    """Total membership test; fields missing from the record read as null."""
    if isinstance(p, Leaf):
        return _eval_leaf(p, record)
    if isinstance(p, And):
        return all(evaluate(c, record) for c in p.items)
    if isinstance(p, Or):
        return any(evaluate(c, record) for c in p.items)
    return not evaluate(p.inner, record)


def select(p: Predicate, d: Dataset, strict: bool = False) -> Selection:
    """Row indices matching the predicate, ascending.

    With ``strict``, a predicate referencing undeclared fields raises
    UnknownFieldError; otherwise such leaves see null cells and match nothing
    (except ``valid: false``).
    """
    if strict:
        unknown = referenced_fields(p) - set(d.field_names())
        if unknown:
            raise UnknownFieldError(
                f"predicate references unknown fields: {sorted(unknown)}"
            )
    indices = tuple(i for i, r in enumerate(d.records) if evaluate(p, r))
    return Selection(dataset_id=d.id, row_indices=indices)


def _fmt(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


# quantitative/temporal extents expose comparable bounds for OutOfExtent checks
def extent_bounds(spec: FieldSpec):
    if isinstance(spec.extent, QuantitativeExtent):
        return spec.extent.min, spec.extent.max
    if isinstance(spec.extent, TemporalExtent):
        return spec.extent.min.epoch_ms, spec.extent.max.epoch_ms
    return None


def nominal_categories(spec: FieldSpec) -> Optional[tuple[str, ...]]:
    if isinstance(spec.extent, NominalExtent):
        return spec.extent.category_names()
    return None
