"""Semantic grouping of tabular data: generation, validation, and navigation.

The pipeline: ingest a table, ask a language model for named/explained/
predicated groupings (semantic bins over one field, highlights over many),
validate every grouping against the actual data, and assemble the result
into a hierarchical textual structure for screen-reader exploration.
"""

from .dataset import (
    Dataset,
    FieldSpec,
    NominalExtent,
    QuantitativeExtent,
    TemporalExtent,
    Timestamp,
    field_summary,
    infer_measure,
    ingest,
    sample_rows,
    to_json_records,
)
from .diagnostics import Diagnostic, DiagnosticCode, has_errors
from .errors import DatascaffoldError
from .gateway import (
    GenerationConfig,
    MockBackend,
    MockBackendConfig,
    PromptSpec,
    RemoteBackendConfig,
    Task,
    build_prompt,
    generate,
    generate_validated,
)
from .predicate import (
    And,
    Leaf,
    Not,
    Or,
    Predicate,
    Selection,
    canonical_json,
    evaluate,
    parse_predicate,
    parse_predicate_obj,
    referenced_fields,
    select,
    typecheck,
)
from .scaffold import (
    Provenance,
    ScaffoldSet,
    SemanticScaffold,
    equal_width_bins,
    scan_explanation_context,
    schema_information_check,
    validate_bin_set,
    validate_highlight,
    validate_scaffold_set,
)
from .structure import (
    StructureNode,
    build_structure,
    from_json,
    render_outline,
    render_predicate_text,
    to_json,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "Dataset",
    "DatascaffoldError",
    "Diagnostic",
    "DiagnosticCode",
    "FieldSpec",
    "GenerationConfig",
    "Leaf",
    "MockBackend",
    "MockBackendConfig",
    "NominalExtent",
    "Not",
    "Or",
    "Predicate",
    "PromptSpec",
    "Provenance",
    "QuantitativeExtent",
    "RemoteBackendConfig",
    "ScaffoldSet",
    "Selection",
    "SemanticScaffold",
    "StructureNode",
    "Task",
    "TemporalExtent",
    "Timestamp",
    "build_prompt",
    "build_structure",
    "canonical_json",
    "equal_width_bins",
    "evaluate",
    "field_summary",
    "from_json",
    "generate",
    "generate_validated",
    "has_errors",
    "infer_measure",
    "ingest",
    "parse_predicate",
    "parse_predicate_obj",
    "referenced_fields",
    "render_outline",
    "render_predicate_text",
    "sample_rows",
    "scan_explanation_context",
    "schema_information_check",
    "select",
    "to_json",
    "to_json_records",
    "typecheck",
    "validate_bin_set",
    "validate_highlight",
    "validate_scaffold_set",
]
