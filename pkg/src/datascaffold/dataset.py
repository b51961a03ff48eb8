"""Tabular ingest: measure inference, extents, and the immutable Dataset.

Cell values are plain Python types: float for numbers, str for text,
:class:`Timestamp` for temporal cells, None for nulls. Datasets are frozen
after construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DecodeError,
    EmptyDatasetError,
    InconsistentColumnsError,
    NonFiniteNumberError,
    TooManyRowsError,
)

MAX_INGEST_ROWS = 50_000

# Share of non-null cells that must parse for a column to win a measure.
MEASURE_THRESHOLD = 0.95

_YEARISH_HEADER = re.compile(r"year|date", re.IGNORECASE)
_BARE_YEAR = re.compile(r"^[12]\d{3}$")
_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_ISO_DATETIME = re.compile(
    r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(:\d{2}(\.\d{1,6})?)?(Z|[+-]\d{2}:\d{2})?$"
)


@dataclass(frozen=True)
class Timestamp:
    """A temporal cell: epoch milliseconds plus the original lexical form.

    Serialization always emits ``lexical`` so the original text round-trips
    byte-exactly; ordering and equality use ``epoch_ms``.
    """

    epoch_ms: int
    lexical: str

    def __lt__(self, other: "Timestamp") -> bool:
        return self.epoch_ms < other.epoch_ms

    def __le__(self, other: "Timestamp") -> bool:
        return self.epoch_ms <= other.epoch_ms

    @property
    def year(self) -> int:
        return datetime.fromtimestamp(self.epoch_ms / 1000, tz=timezone.utc).year


DataValue = Union[float, str, Timestamp, None]


def parse_temporal(text: str, allow_bare_year: bool = True) -> Optional[Timestamp]:
    """Parse a temporal literal; returns None when the grammar rejects it.

    Accepts ISO-8601 dates and datetimes, plus bare 4-digit years when
    ``allow_bare_year``. Naive datetimes are read as UTC.
    """
    text = text.strip()
    if allow_bare_year and _BARE_YEAR.match(text):
        dt = datetime(int(text), 1, 1, tzinfo=timezone.utc)
        return Timestamp(int(dt.timestamp() * 1000), text)
    if _ISO_DATE.match(text):
        try:
            dt = datetime.fromisoformat(text).replace(tzinfo=timezone.utc)
        except ValueError:
            return None
        return Timestamp(int(dt.timestamp() * 1000), text)
    if _ISO_DATETIME.match(text):
        normalized = text.replace("Z", "+00:00")
        try:
            dt = datetime.fromisoformat(normalized)
        except ValueError:
            return None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return Timestamp(int(dt.timestamp() * 1000), text)
    return None


def _parse_number(text: str) -> Optional[float]:
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


@dataclass(frozen=True)
class QuantitativeExtent:
    min: float
    max: float


@dataclass(frozen=True)
class TemporalExtent:
    min: Timestamp
    max: Timestamp


@dataclass(frozen=True)
class NominalExtent:
    # (category, count) in first-appearance order; counts sum to the
    # number of non-null cells in the column.
    categories: tuple[tuple[str, int], ...]

    def category_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.categories)


FieldExtent = Union[QuantitativeExtent, TemporalExtent, NominalExtent]


@dataclass(frozen=True)
class FieldSpec:
    name: str
    measure: str  # "nominal" | "quantitative" | "temporal"
    extent: FieldExtent


@dataclass(frozen=True)
class Dataset:
    id: str
    fields: tuple[FieldSpec, ...]
    records: tuple[Mapping[str, DataValue], ...]

    @property
    def row_count(self) -> int:
        return len(self.records)

    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)

    def field_spec(self, name: str) -> Optional[FieldSpec]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def null_count(self, field_name: str) -> int:
        return sum(1 for r in self.records if r.get(field_name) is None)


def infer_measure(column: Sequence[Optional[str]], header: str = "") -> str:
    """Classify a column of raw cell texts as temporal, quantitative, or nominal.

    Temporal wins when >= 95% of non-empty cells parse under the date grammar
    (bare years only count when the header matches /year|date/i); otherwise
    quantitative under the same threshold for numbers; otherwise nominal.
    """
    non_null = [c for c in column if c is not None and c.strip() != ""]
    if not non_null:
        return "nominal"
    allow_year = bool(_YEARISH_HEADER.search(header))
    temporal_hits = sum(
        1 for c in non_null if parse_temporal(c, allow_bare_year=allow_year) is not None
    )
    if temporal_hits / len(non_null) >= MEASURE_THRESHOLD:
        return "temporal"
    number_hits = sum(1 for c in non_null if _parse_number(c) is not None)
    if number_hits / len(non_null) >= MEASURE_THRESHOLD:
        return "quantitative"
    return "nominal"


def _convert_cell(raw: Optional[str], measure: str, allow_year: bool) -> DataValue:
    if raw is None or raw.strip() == "":
        return None
    if measure == "temporal":
        return parse_temporal(raw, allow_bare_year=allow_year)
    if measure == "quantitative":
        try:
            value = float(raw)
        except ValueError:
            return None
        if not math.isfinite(value):
            raise NonFiniteNumberError(f"non-finite number {raw!r} rejected at ingest")
        return value
    return raw


def _extent_for(measure: str, cells: Iterable[DataValue]) -> FieldExtent:
    values = [c for c in cells if c is not None]
    if measure == "quantitative":
        if not values:
            return QuantitativeExtent(0.0, 0.0)
        return QuantitativeExtent(min(values), max(values))
    if measure == "temporal":
        if not values:
            epoch = Timestamp(0, "1970-01-01")
            return TemporalExtent(epoch, epoch)
        lo = min(values, key=lambda t: t.epoch_ms)
        hi = max(values, key=lambda t: t.epoch_ms)
        return TemporalExtent(lo, hi)
    counts: dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return NominalExtent(tuple(counts.items()))


def _rows_to_dataset(
    dataset_id: str,
    headers: list[str],
    raw_rows: list[list[Optional[str]]],
    max_rows: int,
) -> Dataset:
    if not raw_rows:
        raise EmptyDatasetError("dataset has a header but zero data rows")
    if len(raw_rows) > max_rows:
        raise TooManyRowsError(
            f"{len(raw_rows)} rows exceed the ingest ceiling of {max_rows}"
        )
    seen: set[str] = set()
    for h in headers:
        if not h:
            raise DecodeError("empty column name in header")
        if h in seen:
            raise DecodeError(f"duplicate column name {h!r}")
        seen.add(h)

    columns = {h: [row[i] for row in raw_rows] for i, h in enumerate(headers)}
    measures = {h: infer_measure(columns[h], header=h) for h in headers}

    records = []
    for row in raw_rows:
        record = {
            h: _convert_cell(row[i], measures[h], bool(_YEARISH_HEADER.search(h)))
            for i, h in enumerate(headers)
        }
        records.append(record)

    fields = tuple(
        FieldSpec(h, measures[h], _extent_for(measures[h], (r[h] for r in records)))
        for h in headers
    )
    return Dataset(id=dataset_id, fields=fields, records=tuple(records))


def _ingest_csv(text: str, dataset_id: str, max_rows: int) -> Dataset:
    try:
        rows = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise DecodeError(f"CSV syntax error: {exc}") from exc
    rows = [r for r in rows if r]  # drop fully blank lines
    if not rows:
        raise DecodeError("CSV input has no header row")
    headers = [h.strip() for h in rows[0]]
    raw_rows: list[list[Optional[str]]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) > len(headers):
            raise DecodeError(f"row {lineno} has more cells than the header")
        padded: list[Optional[str]] = list(row) + [None] * (len(headers) - len(row))
        raw_rows.append(padded)
    return _rows_to_dataset(dataset_id, headers, raw_rows, max_rows)


def _reject_json_constant(token: str) -> None:
    raise NonFiniteNumberError(f"non-finite JSON number {token!r} rejected at ingest")


def _ingest_json_records(text: str, dataset_id: str, max_rows: int) -> Dataset:
    try:
        data = json.loads(text, parse_constant=_reject_json_constant)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"JSON syntax error: {exc}") from exc
    if not isinstance(data, list):
        raise DecodeError("json-records input must be a top-level array")
    if not data:
        raise EmptyDatasetError("json-records array is empty")
    if not all(isinstance(obj, dict) for obj in data):
        raise DecodeError("json-records array must contain objects")

    headers = list(data[0].keys())
    declared = set(headers)
    raw_rows: list[list[Optional[str]]] = []
    for idx, obj in enumerate(data):
        extra = set(obj.keys()) - declared
        if extra:
            raise InconsistentColumnsError(
                f"record {idx} carries undeclared keys: {sorted(extra)}"
            )
        row: list[Optional[str]] = []
        for h in headers:
            value = obj.get(h)
            if value is None:
                row.append(None)
            elif isinstance(value, bool):
                row.append("true" if value else "false")
            elif isinstance(value, (int, float)):
                if not math.isfinite(value):
                    raise NonFiniteNumberError(f"non-finite number in record {idx}")
                row.append(_format_number(value))
            elif isinstance(value, str):
                row.append(value if value != "" else None)
            else:
                raise DecodeError(
                    f"record {idx} key {h!r} is not a flat value (got {type(value).__name__})"
                )
        raw_rows.append(row)
    return _rows_to_dataset(dataset_id, headers, raw_rows, max_rows)


def ingest(
    data: bytes,
    format: str,
    dataset_id: Optional[str] = None,
    max_rows: int = MAX_INGEST_ROWS,
) -> Dataset:
    """Parse CSV (RFC 4180, header mandatory) or json-records into a Dataset.

    The default dataset id is content-addressed, so identical bytes always
    yield an identical Dataset, extents and category order included.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"input is not valid UTF-8: {exc}") from exc
    if dataset_id is None:
        digest = hashlib.sha256(format.encode() + b"\x00" + data).hexdigest()[:12]
        dataset_id = f"ds-{digest}"
    if format == "csv":
        return _ingest_csv(text, dataset_id, max_rows)
    if format == "json-records":
        return _ingest_json_records(text, dataset_id, max_rows)
    raise DecodeError(f"unknown format {format!r}")


def sample_rows(d: Dataset, max_rows: int, seed: int) -> list[Mapping[str, DataValue]]:
    """All rows when they fit, else a seeded uniform sample in original order."""
    if max_rows < 1:
        raise ValueError("max_rows must be >= 1")
    if d.row_count <= max_rows:
        return list(d.records)
    rng = random.Random(seed)
    indices = sorted(rng.sample(range(d.row_count), max_rows))
    return [d.records[i] for i in indices]


def _format_number(value: float) -> str:
    """Shortest lexical form: integral floats drop the trailing .0."""
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def cell_to_jsonable(value: DataValue) -> Union[float, int, str, None]:
    """Wire form of a cell: numbers stay numbers, timestamps emit their lexical form."""
    if value is None:
        return None
    if isinstance(value, Timestamp):
        return value.lexical
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def extent_to_jsonable(spec: FieldSpec) -> dict:
    if isinstance(spec.extent, QuantitativeExtent):
        return {
            "min": cell_to_jsonable(spec.extent.min),
            "max": cell_to_jsonable(spec.extent.max),
        }
    if isinstance(spec.extent, TemporalExtent):
        return {"min": spec.extent.min.lexical, "max": spec.extent.max.lexical}
    return {
        "categories": [
            {"category": name, "count": count} for name, count in spec.extent.categories
        ]
    }


def field_summary(d: Dataset) -> dict:
    """Canonical field summary used by the CLI and the HTTP API."""
    return {
        "datasetId": d.id,
        "rowCount": d.row_count,
        "fields": [
            {"name": f.name, "measure": f.measure, "extent": extent_to_jsonable(f)}
            for f in d.fields
        ],
    }


def to_json_records(d: Dataset) -> str:
    """Serialize records so re-ingest reproduces fields, measures, and extents."""
    rows = [
        {name: cell_to_jsonable(r[name]) for name in d.field_names()} for r in d.records
    ]
    return json.dumps(rows, ensure_ascii=False)
