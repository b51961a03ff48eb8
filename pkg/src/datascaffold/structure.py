"""The hierarchical textual representation readers navigate.

The tree is fixed at four levels: root, then the highlight list and one node
per field, then highlights/bins, then paginated record pages. Every
highlight and bin node carries its predicate and the exact count of matching
records, and validation warnings ride along on the nodes they concern so a
reader can appraise generated content in place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Optional, Sequence

from .dataset import Dataset, FieldSpec, NominalExtent, QuantitativeExtent
from .diagnostics import Diagnostic, diagnostic_from_jsonable, has_errors
from .errors import InvalidScaffoldError, UnknownFieldError
from .predicate import (
    And,
    Leaf,
    Not,
    Or,
    Predicate,
    parse_predicate_obj,
    select,
    to_jsonable,
)
from .scaffold import (
    ScaffoldSet,
    equal_width_bins,
    nominal_category_bins,
    validate_scaffold_set,
)

PAGE_SIZE = 20
FALLBACK_BIN_COUNT = 10


@dataclass(frozen=True)
class StructureNode:
    id: str
    kind: str  # root | highlightList | highlight | field | bin | recordPage
    label: str
    description: str
    predicate: Optional[Predicate] = None
    selection_count: Optional[int] = None
    children: tuple["StructureNode", ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()


def _fmt(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def render_predicate_text(p: Predicate) -> str:
    """Deterministic English rendering of a predicate."""
    return _render(p, parent=None)


_LEAF_TEMPLATES = {
    "equal": "{f} is {v}",
    "lt": "{f} is less than {v}",
    "lte": "{f} is at most {v}",
    "gt": "{f} is more than {v}",
    "gte": "{f} is at least {v}",
}


def _render(p: Predicate, parent: Optional[str]) -> str:
    if isinstance(p, Leaf):
        if p.op == "range":
            lo, hi = p.value
            return f"{p.field} is between {_fmt(lo)} and {_fmt(hi)}"
        if p.op == "oneOf":
            return f"{p.field} is one of {', '.join(_fmt(v) for v in p.value)}"
        if p.op == "valid":
            return f"{p.field} has a value" if p.value else f"{p.field} is missing"
        return _LEAF_TEMPLATES[p.op].format(f=p.field, v=_fmt(p.value))
    if isinstance(p, Not):
        inner = _render(p.inner, parent="not")
        if isinstance(p.inner, (And, Or)) and len(p.inner.items) >= 2:
            inner = f"({inner})"
        return f"not {inner}"
    kind = "and" if isinstance(p, And) else "or"
    if not p.items:
        return "all records" if kind == "and" else "no records"
    parts = []
    for child in p.items:
        text = _render(child, parent=kind)
        # parenthesize only where mixing and/or would be ambiguous
        if isinstance(child, (And, Or)) and len(child.items) >= 2:
            child_kind = "and" if isinstance(child, And) else "or"
            if child_kind != kind:
                text = f"({text})"
        parts.append(text)
    return f" {kind} ".join(parts)


def _field_description(spec: FieldSpec) -> str:
    if isinstance(spec.extent, QuantitativeExtent):
        return (
            f"Quantitative field ranging from {_fmt(spec.extent.min)} "
            f"to {_fmt(spec.extent.max)}."
        )
    if isinstance(spec.extent, NominalExtent):
        names = ", ".join(spec.extent.category_names())
        return f"Nominal field with {len(spec.extent.categories)} categories: {names}."
    return (
        f"Temporal field ranging from {spec.extent.min.lexical} "
        f"to {spec.extent.max.lexical}."
    )


def _record_pages(node_id: str, count: int) -> tuple[StructureNode, ...]:
    pages = []
    for page_index, start in enumerate(range(0, count, PAGE_SIZE)):
        end = min(start + PAGE_SIZE, count)
        pages.append(
            StructureNode(
                id=f"{node_id}/page/{page_index}",
                kind="recordPage",
                label=f"Records {start + 1} to {end}",
                description=f"Records {start + 1} to {end} of {count} matching records.",
                selection_count=end - start,
            )
        )
    return tuple(pages)


def _group_node(
    node_id: str,
    kind: str,
    d: Dataset,
    name: str,
    explanation: str,
    predicate: Predicate,
    diagnostics: Sequence[Diagnostic],
) -> StructureNode:
    count = select(predicate, d).count
    prefix = f"{explanation} " if explanation else ""
    description = (
        f"{prefix}{count} of {d.row_count} records. "
        f"Criteria: {render_predicate_text(predicate)}."
    )
    return StructureNode(
        id=node_id,
        kind=kind,
        label=name,
        description=description,
        predicate=predicate,
        selection_count=count,
        children=_record_pages(node_id, count),
        diagnostics=tuple(diagnostics),
    )


def _missing_values_node(d: Dataset, field_name: str) -> Optional[StructureNode]:
    nulls = d.null_count(field_name)
    if nulls == 0:
        return None
    node_id = f"field/{field_name}/missing"
    predicate = Leaf(field_name, "valid", False)
    return StructureNode(
        id=node_id,
        kind="bin",
        label="Missing values",
        description=(
            f"{nulls} of {d.row_count} records have no value for {field_name}. "
            f"Criteria: {render_predicate_text(predicate)}."
        ),
        predicate=predicate,
        selection_count=nulls,
        children=_record_pages(node_id, nulls),
    )


def _split_diagnostics(
    diags: Sequence[Diagnostic], group_count: int
) -> tuple[list[Diagnostic], dict[int, list[Diagnostic]]]:
    set_level: list[Diagnostic] = []
    per_group: dict[int, list[Diagnostic]] = {i: [] for i in range(group_count)}
    for diag in diags:
        if diag.group_index is not None and diag.group_index in per_group:
            per_group[diag.group_index].append(diag)
        else:
            set_level.append(diag)
    return set_level, per_group


def _validated_warnings(scaffold_set: ScaffoldSet, d: Dataset) -> list[Diagnostic]:
    diags = validate_scaffold_set(scaffold_set, d)
    if has_errors(diags):
        first = next(m for m in diags if m.severity == "error")
        raise InvalidScaffoldError(
            f"scaffold set has unresolved errors, e.g. {first.code}: {first.message}"
        )
    return diags


def build_structure(
    d: Dataset,
    bins: Optional[Mapping[str, ScaffoldSet]] = None,
    highlights: Optional[ScaffoldSet] = None,
) -> StructureNode:
    """Assemble the navigation tree from a dataset and validated scaffold sets.

    Fields without semantic bins fall back to ten equal-width bins
    (continuous) or one bin per category (nominal); records with a null cell
    gather under an automatic missing-values bin. Scaffold sets that still
    carry error-severity diagnostics are rejected.
    """
    bins = dict(bins or {})
    for field_name in bins:
        if d.field_spec(field_name) is None:
            raise UnknownFieldError(f'bins provided for unknown field "{field_name}"')
        if bins[field_name].field != field_name:
            raise InvalidScaffoldError(
                f'bin set for "{field_name}" actually targets "{bins[field_name].field}"'
            )

    highlight_children: tuple[StructureNode, ...] = ()
    highlight_list_diags: list[Diagnostic] = []
    if highlights is not None:
        warnings = _validated_warnings(highlights, d)
        set_level, per_group = _split_diagnostics(warnings, len(highlights.groups))
        highlight_list_diags = set_level
        highlight_children = tuple(
            _group_node(
                f"highlights/{i}",
                "highlight",
                d,
                group.name,
                group.explanation,
                group.predicate,
                per_group[i],
            )
            for i, group in enumerate(highlights.groups)
        )

    children: list[StructureNode] = [
        StructureNode(
            id="highlights",
            kind="highlightList",
            label="Highlights",
            description=f"{len(highlight_children)} data highlights.",
            children=highlight_children,
            diagnostics=tuple(highlight_list_diags),
        )
    ]

    for spec in d.fields:
        semantic = bins.get(spec.name)
        if semantic is not None:
            warnings = _validated_warnings(semantic, d)
            set_level, per_group = _split_diagnostics(warnings, len(semantic.groups))
            bin_set, field_diags = semantic, set_level
        elif spec.measure == "nominal":
            bin_set, field_diags = nominal_category_bins(d, spec.name), []
            per_group = {i: [] for i in range(len(bin_set.groups))}
        else:
            bin_set = equal_width_bins(d, spec.name, FALLBACK_BIN_COUNT)
            field_diags = []
            per_group = {i: [] for i in range(len(bin_set.groups))}

        bin_children = [
            _group_node(
                f"field/{spec.name}/bin/{i}",
                "bin",
                d,
                group.name,
                group.explanation,
                group.predicate,
                per_group[i],
            )
            for i, group in enumerate(bin_set.groups)
        ]
        missing = _missing_values_node(d, spec.name)
        if missing is not None:
            bin_children.append(missing)

        children.append(
            StructureNode(
                id=f"field/{spec.name}",
                kind="field",
                label=spec.name,
                description=_field_description(spec),
                children=tuple(bin_children),
                diagnostics=tuple(field_diags),
            )
        )

    names = ", ".join(d.field_names())
    return StructureNode(
        id="root",
        kind="root",
        label="Dataset",
        description=(
            f"Dataset with {d.row_count} records and {len(d.fields)} fields: {names}."
        ),
        children=tuple(children),
    )


# --- rendering and wire format ---

def _height(node: StructureNode) -> int:
    if not node.children:
        return 0
    return 1 + max(_height(c) for c in node.children)


def render_outline(root: StructureNode, max_depth: int) -> str:
    """Indented outline, one line per node, two spaces per level.

    Nodes deeper than ``max_depth`` are folded into an inline marker on their
    deepest shown ancestor.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    lines: list[str] = []

    def emit(node: StructureNode, depth: int) -> None:
        line = f"{'  ' * depth}{node.label} — {node.description}"
        if depth == max_depth - 1 and node.children:
            hidden = _height(node)
            line += f" … {hidden} more level{'s' if hidden != 1 else ''}"
            lines.append(line)
            return
        lines.append(line)
        for child in node.children:
            emit(child, depth + 1)

    emit(root, 0)
    return "\n".join(lines)


def structure_to_jsonable(node: StructureNode) -> dict:
    return {
        "id": node.id,
        "kind": node.kind,
        "label": node.label,
        "description": node.description,
        "predicate": to_jsonable(node.predicate) if node.predicate is not None else None,
        "selectionCount": node.selection_count,
        "diagnostics": [d.to_jsonable() for d in node.diagnostics],
        "children": [structure_to_jsonable(c) for c in node.children],
    }


def to_json(root: StructureNode) -> str:
    """Canonical bytes for the structure tree; the UI's single contract."""
    return json.dumps(structure_to_jsonable(root), separators=(",", ":"), ensure_ascii=False)


def structure_from_jsonable(obj: dict) -> StructureNode:
    return StructureNode(
        id=obj["id"],
        kind=obj["kind"],
        label=obj["label"],
        description=obj["description"],
        predicate=(
            parse_predicate_obj(obj["predicate"]) if obj.get("predicate") is not None else None
        ),
        selection_count=obj.get("selectionCount"),
        children=tuple(structure_from_jsonable(c) for c in obj.get("children", [])),
        diagnostics=tuple(diagnostic_from_jsonable(x) for x in obj.get("diagnostics", [])),
    )


def from_json(text: str) -> StructureNode:
    return structure_from_jsonable(json.loads(text))
