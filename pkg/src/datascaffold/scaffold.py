"""Scaffold data model and the validators that ground groupings in the data.

A scaffold is a named, explained, machine-checkable grouping. Bin sets
partition a single field; highlights select multi-field record subsets.
Validators return :class:`Diagnostic` lists instead of raising so callers
(the repair loop, the CLI, the UI) can act on every finding at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from typing import Optional, Sequence, Union

from .dataset import (
    Dataset,
    NominalExtent,
    QuantitativeExtent,
    TemporalExtent,
    Timestamp,
)
from .diagnostics import Diagnostic, DiagnosticCode, has_errors
from .errors import (
    FieldNotContinuousError,
    NotABinPredicateError,
    UnknownFieldError,
)
from .predicate import (
    And,
    Leaf,
    Not,
    Predicate,
    parse_predicate_obj,
    referenced_fields,
    select,
    to_jsonable,
    typecheck,
    _temporal_literal,
)

COVERAGE_GRID_POINTS = 1000  # grid resolution for the interval-union check

_YEAR_TOKEN = re.compile(r"\b([12]\d{3})\b")

# Field names that carry no domain information; a schema dominated by these
# invites the model to invent a domain.
_GENERIC_NAMES = {"category", "value", "field", "data", "x", "y", "a", "b", "c"}
_GENERIC_PREFIXES = ("col", "column", "var")


@dataclass(frozen=True)
class Provenance:
    kind: str  # "llm" | "fallback" | "manual"
    model: Optional[str] = None
    attempts: Optional[int] = None

    def to_jsonable(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "llm":
            out["model"] = self.model
            out["attempts"] = self.attempts
        return out


@dataclass(frozen=True)
class SemanticScaffold:
    name: str
    explanation: str
    predicate: Predicate

    def __post_init__(self):
        if not self.name:
            raise ValueError("scaffold name must be non-empty")

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "explanation": self.explanation,
            "predicate": to_jsonable(self.predicate),
        }


@dataclass(frozen=True)
class ScaffoldSet:
    kind: str  # "bins" | "highlights"
    groups: tuple[SemanticScaffold, ...]
    field: Optional[str] = None
    provenance: Provenance = dc_field(default_factory=lambda: Provenance("manual"))

    def __post_init__(self):
        if self.kind not in ("bins", "highlights"):
            raise ValueError(f"unknown scaffold-set kind {self.kind!r}")
        if self.kind == "bins" and not self.field:
            raise ValueError("bins scaffold set needs a field name")
        if not self.groups:
            raise ValueError("scaffold set must contain at least one group")

    def to_jsonable(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.field is not None:
            out["field"] = self.field
        out["provenance"] = self.provenance.to_jsonable()
        out["groups"] = [g.to_jsonable() for g in self.groups]
        return out


def scaffold_groups_from_jsonable(obj: dict) -> tuple[SemanticScaffold, ...]:
    """Read the ``{"groups": [{name, explanation, predicate}, ...]}`` file format."""
    if not isinstance(obj, dict) or not isinstance(obj.get("groups"), list):
        raise ValueError('scaffold file must be an object with a "groups" array')
    groups = []
    for entry in obj["groups"]:
        groups.append(
            SemanticScaffold(
                name=entry["name"],
                explanation=entry.get("explanation", ""),
                predicate=parse_predicate_obj(entry["predicate"]),
            )
        )
    return tuple(groups)


# --- highlight validation ---

def _literal_comparable(value, measure: str):
    if measure == "temporal":
        ts = _temporal_literal(value)
        return None if ts is None else ts.epoch_ms
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return float(value)


def _fmt_point(value: float, measure: str) -> str:
    if measure == "temporal":
        return (
            datetime.fromtimestamp(value / 1000, tz=timezone.utc)
            .date()
            .isoformat()
        )
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _out_of_extent_checks(p: Predicate, d: Dataset) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def check_leaf(leaf: Leaf) -> None:
        spec = d.field_spec(leaf.field)
        if spec is None or spec.measure == "nominal" or leaf.op == "valid":
            return
        if isinstance(spec.extent, QuantitativeExtent):
            lo, hi = spec.extent.min, spec.extent.max
        else:
            lo, hi = spec.extent.min.epoch_ms, spec.extent.max.epoch_ms
        literals = leaf.value if leaf.op in ("range", "oneOf") else (leaf.value,)
        for raw in literals:
            value = _literal_comparable(raw, spec.measure)
            if value is None:
                continue
            if value < lo or value > hi:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.OUT_OF_EXTENT,
                        "warning",
                        f'value {raw if isinstance(raw, str) else _fmt_point(value, spec.measure)} '
                        f'for field "{leaf.field}" lies outside the data extent '
                        f"[{_fmt_point(lo, spec.measure)}, {_fmt_point(hi, spec.measure)}]",
                    )
                )

    def walk(node: Predicate) -> None:
        if isinstance(node, Leaf):
            check_leaf(node)
        elif isinstance(node, Not):
            walk(node.inner)
        else:
            for c in node.items:
                walk(c)

    walk(p)
    return diags


def validate_highlight(s: SemanticScaffold, d: Dataset) -> list[Diagnostic]:
    """Typecheck, then judge the highlight's selection against the dataset.

    Typecheck errors short-circuit the selection analysis: counting rows under
    an ill-typed predicate would only produce misleading follow-on findings.
    """
    diags = typecheck(s.predicate, d.fields)
    if has_errors(diags):
        return diags
    count = select(s.predicate, d).count
    if count == 0:
        diags.append(
            Diagnostic(
                DiagnosticCode.EMPTY_SELECTION,
                "error",
                f'predicate of "{s.name}" matches 0 of {d.row_count} records',
            )
        )
    elif count == d.row_count:
        diags.append(
            Diagnostic(
                DiagnosticCode.UNIVERSAL_SELECTION,
                "warning",
                f'predicate of "{s.name}" matches all {d.row_count} records; '
                "the grouping does not distinguish anything",
            )
        )
    diags.extend(_out_of_extent_checks(s.predicate, d))
    return diags


# --- bin-set validation ---

@dataclass(frozen=True)
class _Interval:
    lo: float  # -inf allowed
    lo_open: bool
    hi: float  # +inf allowed
    hi_open: bool


_LOWER_OPS = {"gte": False, "gt": True}
_UPPER_OPS = {"lte": False, "lt": True}


def _interval_of(p: Predicate, field: str, measure: str, group_name: str) -> _Interval:
    def bound(value) -> float:
        if measure == "temporal":
            ts = _temporal_literal(value)
            return float(ts.epoch_ms)
        return float(value)

    def reject(why: str) -> NotABinPredicateError:
        return NotABinPredicateError(f'group "{group_name}": {why}')

    if isinstance(p, Leaf):
        if p.field != field:
            raise reject(f'references field "{p.field}" instead of "{field}"')
        if p.op == "range":
            return _Interval(bound(p.value[0]), False, bound(p.value[1]), False)
        if p.op in _LOWER_OPS:
            return _Interval(bound(p.value), _LOWER_OPS[p.op], float("inf"), True)
        if p.op in _UPPER_OPS:
            return _Interval(float("-inf"), True, bound(p.value), _UPPER_OPS[p.op])
        raise reject(f'operator "{p.op}" does not denote an interval')
    if isinstance(p, And):
        lower: Optional[tuple[float, bool]] = None
        upper: Optional[tuple[float, bool]] = None
        if not p.items:
            raise reject("empty conjunction is not an interval")
        for item in p.items:
            if not isinstance(item, Leaf) or item.field != field:
                raise reject("conjunction must contain only bounds on the binned field")
            if item.op in _LOWER_OPS:
                if lower is not None:
                    raise reject("conjunction has two lower bounds")
                lower = (bound(item.value), _LOWER_OPS[item.op])
            elif item.op in _UPPER_OPS:
                if upper is not None:
                    raise reject("conjunction has two upper bounds")
                upper = (bound(item.value), _UPPER_OPS[item.op])
            else:
                raise reject(f'operator "{item.op}" is not an interval bound')
        lo, lo_open = lower if lower else (float("-inf"), True)
        hi, hi_open = upper if upper else (float("inf"), True)
        return _Interval(lo, lo_open, hi, hi_open)
    raise reject("predicate is not an interval over the binned field")


def _intervals_intersect(a: _Interval, b: _Interval) -> Optional[tuple[float, float]]:
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return None
    if lo == hi:
        # single shared point; it must be closed on both sides of both intervals
        return (lo, hi) if _contains(a, lo) and _contains(b, lo) else None
    return (lo, hi)


def _contains(iv: _Interval, point: float) -> bool:
    if point < iv.lo or (point == iv.lo and iv.lo_open):
        return False
    if point > iv.hi or (point == iv.hi and iv.hi_open):
        return False
    return True


def _continuous_bin_diags(
    groups: Sequence[SemanticScaffold],
    intervals: Sequence[_Interval],
    d: Dataset,
    field: str,
    measure: str,
) -> list[Diagnostic]:
    spec = d.field_spec(field)
    if isinstance(spec.extent, QuantitativeExtent):
        ext_lo, ext_hi = float(spec.extent.min), float(spec.extent.max)
    else:
        ext_lo, ext_hi = float(spec.extent.min.epoch_ms), float(spec.extent.max.epoch_ms)

    diags: list[Diagnostic] = []

    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            region = _intervals_intersect(intervals[i], intervals[j])
            if region is not None:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.OVERLAPPING_BINS,
                        "error",
                        f'bins "{groups[i].name}" and "{groups[j].name}" overlap on field '
                        f'"{field}" between {_fmt_point(region[0], measure)} and '
                        f"{_fmt_point(region[1], measure)}",
                    )
                )

    # grid over the extent plus every actual cell value: no record can hide
    # between grid points
    points = {ext_lo, ext_hi}
    span = ext_hi - ext_lo
    for i in range(1, COVERAGE_GRID_POINTS):
        points.add(ext_lo + span * i / COVERAGE_GRID_POINTS)
    for record in d.records:
        cell = record.get(field)
        if cell is None:
            continue
        points.add(float(cell.epoch_ms) if isinstance(cell, Timestamp) else float(cell))

    uncovered = sorted(
        pt for pt in points if not any(_contains(iv, pt) for iv in intervals)
    )
    if uncovered:
        # report one gap per maximal run of consecutive uncovered points,
        # snapping the reported edges to interval endpoints for readability
        edges = {ext_lo, ext_hi}
        for iv in intervals:
            for endpoint in (iv.lo, iv.hi):
                if endpoint not in (float("-inf"), float("inf")):
                    edges.add(endpoint)
        step = span / COVERAGE_GRID_POINTS if span > 0 else 1.0
        runs: list[tuple[float, float]] = []
        start = prev = uncovered[0]
        for pt in uncovered[1:]:
            if pt - prev > step * 1.5:
                runs.append((start, prev))
                start = pt
            prev = pt
        runs.append((start, prev))
        for lo, hi in runs:
            lo_edge = max((e for e in edges if e <= lo), default=lo)
            hi_edge = min((e for e in edges if e >= hi), default=hi)
            diags.append(
                Diagnostic(
                    DiagnosticCode.COVERAGE_GAP,
                    "error",
                    f'bins leave field "{field}" uncovered between '
                    f"{_fmt_point(lo_edge, measure)} and {_fmt_point(hi_edge, measure)} "
                    f"(extent {_fmt_point(ext_lo, measure)} to {_fmt_point(ext_hi, measure)})",
                )
            )

    for idx, iv in enumerate(intervals):
        for endpoint in (iv.lo, iv.hi):
            if endpoint not in (float("-inf"), float("inf")) and (
                endpoint < ext_lo or endpoint > ext_hi
            ):
                diags.append(
                    Diagnostic(
                        DiagnosticCode.OUT_OF_EXTENT,
                        "warning",
                        f'bin "{groups[idx].name}" bound {_fmt_point(endpoint, measure)} lies '
                        f'outside the extent of field "{field}" '
                        f"[{_fmt_point(ext_lo, measure)}, {_fmt_point(ext_hi, measure)}]",
                        group_index=idx,
                    )
                )
    return diags


def _nominal_bin_diags(
    groups: Sequence[SemanticScaffold], d: Dataset, field: str
) -> list[Diagnostic]:
    spec = d.field_spec(field)
    categories = spec.extent.category_names()
    membership: dict[str, list[int]] = {}
    diags: list[Diagnostic] = []

    for idx, group in enumerate(groups):
        p = group.predicate
        if not isinstance(p, Leaf) or p.field != field or p.op not in ("equal", "oneOf"):
            raise NotABinPredicateError(
                f'group "{group.name}": nominal bins must be an equal/oneOf '
                f'predicate over field "{field}"'
            )
        values = p.value if p.op == "oneOf" else (p.value,)
        for v in values:
            if not isinstance(v, str):
                raise NotABinPredicateError(
                    f'group "{group.name}": category {v!r} is not text'
                )
            if v not in categories:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.OUT_OF_EXTENT,
                        "warning",
                        f'group "{group.name}" names category "{v}" which does not occur '
                        f'in field "{field}"',
                        group_index=idx,
                    )
                )
            membership.setdefault(v, []).append(idx)

    for category in categories:
        owners = membership.get(category, [])
        if len(owners) > 1:
            names = ", ".join(f'"{groups[i].name}"' for i in owners)
            diags.append(
                Diagnostic(
                    DiagnosticCode.NON_EXCLUSIVE_GROUPS,
                    "error",
                    f'category "{category}" of field "{field}" appears in more than one '
                    f"group: {names}",
                )
            )
    missing = [c for c in categories if c not in membership]
    for category in missing:
        diags.append(
            Diagnostic(
                DiagnosticCode.NON_EXHAUSTIVE_GROUPS,
                "error",
                f'category "{category}" of field "{field}" is not covered by any group',
            )
        )
    return diags


def validate_bin_set(scaffold_set: ScaffoldSet, d: Dataset) -> list[Diagnostic]:
    """Check the partition constraints for a bin set.

    Continuous fields: every group must denote one interval; intervals must be
    pairwise disjoint and jointly cover the observed extent. Nominal fields:
    groups are category sets that must be mutually exclusive and exhaustive.
    Raises NotABinPredicateError when a group is not a bin-shaped predicate.
    """
    if scaffold_set.kind != "bins":
        raise ValueError("validate_bin_set expects a bins scaffold set")
    field = scaffold_set.field
    spec = d.field_spec(field)
    if spec is None:
        raise UnknownFieldError(f'dataset has no field "{field}"')

    diags: list[Diagnostic] = []
    for idx, group in enumerate(scaffold_set.groups):
        for diag in typecheck(group.predicate, d.fields):
            diags.append(diag.with_group(idx))
        extra = referenced_fields(group.predicate) - {field}
        if extra:
            raise NotABinPredicateError(
                f'group "{group.name}": references fields {sorted(extra)} besides "{field}"'
            )
    if has_errors(diags):
        return diags

    if spec.measure == "nominal":
        return _nominal_bin_diags(scaffold_set.groups, d, field)

    intervals = [
        _interval_of(g.predicate, field, spec.measure, g.name)
        for g in scaffold_set.groups
    ]
    return _continuous_bin_diags(scaffold_set.groups, intervals, d, field, spec.measure)


# --- dataset-context heuristics ---

def scan_explanation_context(s: SemanticScaffold, d: Dataset) -> list[Diagnostic]:
    """Flag 4-digit year tokens in the prose that fall outside every temporal extent."""
    temporal = [f for f in d.fields if isinstance(f.extent, TemporalExtent)]
    if not temporal:
        return []
    text = f"{s.name} {s.explanation}"
    diags: list[Diagnostic] = []
    for token in dict.fromkeys(_YEAR_TOKEN.findall(text)):
        year = int(token)
        if any(f.extent.min.year <= year <= f.extent.max.year for f in temporal):
            continue
        coverage = "; ".join(
            f'field "{f.name}" covers {f.extent.min.lexical} to {f.extent.max.lexical}'
            for f in temporal
        )
        diags.append(
            Diagnostic(
                DiagnosticCode.TEMPORAL_OUT_OF_SCOPE,
                "warning",
                f'the text of "{s.name}" mentions the year {token}, which is outside '
                f"the dataset's temporal coverage ({coverage})",
            )
        )
    return diags


def _is_generic(name: str) -> bool:
    lowered = name.lower()
    return lowered in _GENERIC_NAMES or lowered.startswith(_GENERIC_PREFIXES)


def schema_information_check(d: Dataset) -> list[Diagnostic]:
    """Warn when at least half the field names are too generic to anchor semantics."""
    generic = [f.name for f in d.fields if _is_generic(f.name)]
    if d.fields and len(generic) * 2 >= len(d.fields):
        return [
            Diagnostic(
                DiagnosticCode.LOW_INFORMATION_SCHEMA,
                "warning",
                f"{len(generic)} of {len(d.fields)} field names are generic "
                f"({', '.join(generic)}); generated meanings for this dataset may be "
                "invented rather than grounded",
            )
        ]
    return []


# --- conventional fallback bins ---

def _fmt_bound(value: float, measure: str) -> Union[float, str]:
    """Predicate literal for a bin bound."""
    if measure == "temporal":
        dt = datetime.fromtimestamp(value / 1000, tz=timezone.utc)
        return dt.strftime("%Y-%m-%dT%H:%M:%S")
    return value


def equal_width_bins(d: Dataset, field: str, k: int) -> ScaffoldSet:
    """k equal-width bins over a continuous field; lower-inclusive, the last
    bin also upper-inclusive. Always validates clean by construction."""
    if k < 1:
        raise ValueError("k must be >= 1")
    spec = d.field_spec(field)
    if spec is None:
        raise UnknownFieldError(f'dataset has no field "{field}"')
    if spec.measure == "nominal":
        raise FieldNotContinuousError(
            f'field "{field}" is nominal; equal-width bins need a continuous field'
        )
    if isinstance(spec.extent, QuantitativeExtent):
        lo, hi = float(spec.extent.min), float(spec.extent.max)
    else:
        lo, hi = float(spec.extent.min.epoch_ms), float(spec.extent.max.epoch_ms)

    measure = spec.measure
    groups: list[SemanticScaffold] = []
    if lo == hi:
        # a point extent cannot be split; one degenerate bin
        bound = _fmt_bound(lo, measure)
        groups.append(
            SemanticScaffold(
                name=f"{_fmt_point(lo, measure)} to {_fmt_point(hi, measure)}",
                explanation="",
                predicate=Leaf(field, "range", (bound, bound)),
            )
        )
    else:
        width = (hi - lo) / k
        edges = [lo + width * i for i in range(k)] + [hi]
        for i in range(k):
            lower, upper = edges[i], edges[i + 1]
            last = i == k - 1
            groups.append(
                SemanticScaffold(
                    name=f"{_fmt_point(lower, measure)} to {_fmt_point(upper, measure)}",
                    explanation="",
                    predicate=And(
                        (
                            Leaf(field, "gte", _fmt_bound(lower, measure)),
                            Leaf(field, "lte" if last else "lt", _fmt_bound(upper, measure)),
                        )
                    ),
                )
            )
    return ScaffoldSet(
        kind="bins",
        groups=tuple(groups),
        field=field,
        provenance=Provenance("fallback"),
    )


def nominal_category_bins(d: Dataset, field: str) -> ScaffoldSet:
    """One bin per category, in first-appearance order (fallback for nominal fields)."""
    spec = d.field_spec(field)
    if spec is None:
        raise UnknownFieldError(f'dataset has no field "{field}"')
    if not isinstance(spec.extent, NominalExtent):
        raise FieldNotContinuousError(f'field "{field}" is not nominal')
    groups = tuple(
        SemanticScaffold(name=name, explanation="", predicate=Leaf(field, "equal", name))
        for name, _ in spec.extent.categories
    )
    if not groups:
        groups = (
            SemanticScaffold(
                name="(no values)", explanation="", predicate=Leaf(field, "valid", True)
            ),
        )
    return ScaffoldSet(
        kind="bins", groups=groups, field=field, provenance=Provenance("fallback")
    )


def validate_scaffold_set(scaffold_set: ScaffoldSet, d: Dataset) -> list[Diagnostic]:
    """Full validation pass: structural checks plus the context heuristics.

    Bin-shape violations surface as error-severity SchemaViolation diagnostics
    here (rather than the raw NotABinPredicateError) so the repair loop can
    quote them back to the model.
    """
    diags: list[Diagnostic] = []
    if scaffold_set.kind == "bins":
        try:
            diags.extend(validate_bin_set(scaffold_set, d))
        except NotABinPredicateError as exc:
            diags.append(
                Diagnostic(
                    DiagnosticCode.SCHEMA_VIOLATION,
                    "error",
                    f"a bins response must partition field \"{scaffold_set.field}\": {exc}",
                )
            )
    else:
        for idx, group in enumerate(scaffold_set.groups):
            for diag in validate_highlight(group, d):
                diags.append(diag.with_group(idx))
    for idx, group in enumerate(scaffold_set.groups):
        for diag in scan_explanation_context(group, d):
            diags.append(diag.with_group(idx))
    diags.extend(schema_information_check(d))
    return diags
