"""Exception hierarchy shared across the package."""

from __future__ import annotations


class DatascaffoldError(Exception):
    """Base class for all package-specific errors."""


# --- ingest ---

class IngestError(DatascaffoldError):
    pass


class DecodeError(IngestError):
    """Input bytes are not valid UTF-8 / CSV / JSON, or rows are malformed."""


class InconsistentColumnsError(IngestError):
    """A json-records object carries a key the first record did not declare."""


class EmptyDatasetError(IngestError):
    """The input has a header (or schema) but zero data rows."""


class TooManyRowsError(IngestError):
    """Row count exceeds the configured ingest ceiling."""


class NonFiniteNumberError(IngestError):
    """A numeric cell parsed to NaN or infinity."""


# --- predicates ---

class PredicateParseError(DatascaffoldError):
    pass


class PredicateSyntaxError(PredicateParseError):
    """The predicate text is not well-formed JSON."""


class UnknownOperatorError(PredicateParseError):
    """A predicate node carries a key outside the known grammar."""


class MultipleOperatorsError(PredicateParseError):
    """A leaf carries more than one operator key."""


class MissingFieldError(PredicateParseError):
    """A leaf has no "field" key."""


class MissingOperatorError(PredicateParseError):
    """A leaf has a "field" key but no operator."""


class UnknownFieldError(DatascaffoldError):
    """A predicate references a field the dataset does not declare."""


# --- scaffolds ---

class FieldNotContinuousError(DatascaffoldError):
    """Equal-width binning requested on a nominal field."""


class NotABinPredicateError(DatascaffoldError):
    """A bin group's predicate is not a single-field interval or category set."""


class InvalidScaffoldError(DatascaffoldError):
    """A scaffold set with error-severity diagnostics was passed where a validated one is required."""


# --- gateway ---

class GatewayError(DatascaffoldError):
    pass


class TransportError(GatewayError):
    """Network failure or HTTP status outside the auth range."""


class AuthError(GatewayError):
    """The backend rejected the request with 401/403."""


class SchemaViolationError(GatewayError):
    """The model response does not match the expected response shape."""


class GroupPredicateError(GatewayError):
    """A group's predicate failed to parse; carries the group index."""

    def __init__(self, group_index: int, cause: PredicateParseError):
        super().__init__(f"group {group_index}: {cause}")
        self.group_index = group_index
        self.cause = cause
