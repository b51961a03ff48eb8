"""Coded validation findings shared by the typechecker, validators, and UI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class DiagnosticCode:
    UNKNOWN_FIELD = "UnknownField"
    TYPE_MISMATCH = "TypeMismatch"
    MALFORMED_RANGE = "MalformedRange"
    EMPTY_SELECTION = "EmptySelection"
    UNIVERSAL_SELECTION = "UniversalSelection"
    OVERLAPPING_BINS = "OverlappingBins"
    COVERAGE_GAP = "CoverageGap"
    NON_EXCLUSIVE_GROUPS = "NonExclusiveGroups"
    NON_EXHAUSTIVE_GROUPS = "NonExhaustiveGroups"
    OUT_OF_EXTENT = "OutOfExtent"
    TEMPORAL_OUT_OF_SCOPE = "TemporalOutOfScope"
    LOW_INFORMATION_SCHEMA = "LowInformationSchema"
    SCHEMA_VIOLATION = "SchemaViolation"

    ALL = (
        UNKNOWN_FIELD,
        TYPE_MISMATCH,
        MALFORMED_RANGE,
        EMPTY_SELECTION,
        UNIVERSAL_SELECTION,
        OVERLAPPING_BINS,
        COVERAGE_GAP,
        NON_EXCLUSIVE_GROUPS,
        NON_EXHAUSTIVE_GROUPS,
        OUT_OF_EXTENT,
        TEMPORAL_OUT_OF_SCOPE,
        LOW_INFORMATION_SCHEMA,
        SCHEMA_VIOLATION,
    )


@dataclass(frozen=True)
class Diagnostic:
    """A single validation finding.

    Messages name the concrete fields and values involved so the repair loop
    can quote them back to the model and the UI can render them verbatim.
    """

    code: str
    severity: str  # "error" | "warning"
    message: str
    group_index: Optional[int] = None

    def with_group(self, index: int) -> "Diagnostic":
        return Diagnostic(self.code, self.severity, self.message, index)

    def to_jsonable(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "groupIndex": self.group_index,
        }


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)


def error_messages(diags: list[Diagnostic]) -> list[str]:
    """Error-severity messages, deduplicated, in first-seen order."""
    return list(dict.fromkeys(d.message for d in diags if d.severity == "error"))


def diagnostic_from_jsonable(obj: dict) -> Diagnostic:
    return Diagnostic(
        code=obj["code"],
        severity=obj["severity"],
        message=obj["message"],
        group_index=obj.get("groupIndex"),
    )
