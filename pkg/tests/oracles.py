"""Independent brute-force interpreters the implementation is checked against.

Everything here is written directly against the JSON predicate form and raw
cell values, sharing no logic with the package's evaluator or validators.
"""

from __future__ import annotations

import re
from datetime import datetime, timezone

from datascaffold.dataset import Timestamp

_YEAR = re.compile(r"^[12]\d{3}$")


def _ts_ms(literal) -> int | None:
    """Temporal literal to epoch ms, implemented with plain datetime calls."""
    if isinstance(literal, bool):
        return None
    if isinstance(literal, (int, float)):
        if float(literal).is_integer() and 1000 <= literal <= 2999:
            dt = datetime(int(literal), 1, 1, tzinfo=timezone.utc)
            return int(dt.timestamp() * 1000)
        return None
    text = str(literal).strip()
    if _YEAR.fullmatch(text):
        dt = datetime(int(text), 1, 1, tzinfo=timezone.utc)
        return int(dt.timestamp() * 1000)
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)


def _pair(cell, literal):
    if isinstance(cell, Timestamp):
        ms = _ts_ms(literal)
        return None if ms is None else (cell.epoch_ms, ms)
    if isinstance(cell, float):
        if isinstance(literal, bool) or not isinstance(literal, (int, float)):
            return None
        return (cell, float(literal))
    if isinstance(literal, str):
        return (cell, literal)
    return None


def naive_evaluate(pred: dict, record: dict) -> bool:
    """Reference semantics, recursing over the raw JSON predicate."""
    if "and" in pred:
        return all(naive_evaluate(c, record) for c in pred["and"])
    if "or" in pred:
        return any(naive_evaluate(c, record) for c in pred["or"])
    if "not" in pred:
        return not naive_evaluate(pred["not"], record)

    field = pred["field"]
    cell = record.get(field)
    op = next(k for k in pred if k != "field")
    value = pred[op]

    if op == "valid":
        return (cell is not None) if value else (cell is None)
    if cell is None:
        return False
    if op == "equal":
        pair = _pair(cell, value)
        return pair is not None and pair[0] == pair[1]
    if op == "oneOf":
        for candidate in value:
            pair = _pair(cell, candidate)
            if pair is not None and pair[0] == pair[1]:
                return True
        return False
    if isinstance(cell, str):
        return False  # no ordering on text cells
    if op == "range":
        lo = _pair(cell, value[0])
        hi = _pair(cell, value[1])
        if lo is None or hi is None:
            return False
        return lo[1] <= lo[0] and hi[0] <= hi[1]
    pair = _pair(cell, value)
    if pair is None:
        return False
    a, b = pair
    return {"lt": a < b, "lte": a <= b, "gt": a > b, "gte": a >= b}[op]


def naive_select(pred: dict, records) -> list[int]:
    return [i for i, r in enumerate(records) if naive_evaluate(pred, r)]


# --- interval oracles -------------------------------------------------------
# Intervals are (lo, lo_open, hi, hi_open) tuples over floats with +-inf.

def point_in_interval(point: float, interval) -> bool:
    lo, lo_open, hi, hi_open = interval
    if point < lo or point > hi:
        return False
    if point == lo and lo_open:
        return False
    if point == hi and hi_open:
        return False
    return True


def intervals_overlap_oracle(intervals) -> set[tuple[int, int]]:
    """Pairs that intersect, decided purely by point-membership probes.

    Probe points: every finite endpoint and the midpoint between each pair of
    consecutive distinct endpoint values. Any nonempty intersection of two
    intervals with these endpoints contains one of the probes.
    """
    endpoints = sorted(
        {e for iv in intervals for e in (iv[0], iv[2]) if e not in (float("-inf"), float("inf"))}
    )
    probes = list(endpoints)
    for a, b in zip(endpoints, endpoints[1:]):
        probes.append((a + b) / 2)
    if endpoints:
        probes.append(endpoints[0] - 1.0)
        probes.append(endpoints[-1] + 1.0)
    hits = set()
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            for p in probes:
                if point_in_interval(p, intervals[i]) and point_in_interval(p, intervals[j]):
                    hits.add((i, j))
                    break
    return hits


def coverage_gap_oracle(intervals, extent_lo: float, extent_hi: float, data_values) -> bool:
    """True when some grid point (1001 across the extent) or data value is
    covered by no interval."""
    points = [extent_lo, extent_hi]
    span = extent_hi - extent_lo
    for i in range(1, 1000):
        points.append(extent_lo + span * i / 1000)
    points.extend(data_values)
    return any(
        not any(point_in_interval(p, iv) for iv in intervals) for p in points
    )


# --- nominal set-cover oracle ------------------------------------------------

def set_cover_oracle(groups: list[set[str]], categories: list[str]):
    """(duplicated categories, uncovered categories) by brute-force counting."""
    duplicated = set()
    uncovered = set()
    for category in categories:
        owners = sum(1 for g in groups if category in g)
        if owners > 1:
            duplicated.add(category)
        if owners == 0:
            uncovered.add(category)
    return duplicated, uncovered
