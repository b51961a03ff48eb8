"""Prompt construction, backend calls, and the validate-and-repair loop.

The remote backend speaks the chat-completions protocol with a JSON-schema
response format. The mock backend replays canned response bodies from a
fixture file and is the backend every test and offline demo runs against:
with it the whole pipeline is deterministic, prompt bytes included.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field as dc_field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import jsonschema
import requests

from .dataset import Dataset, cell_to_jsonable, extent_to_jsonable, sample_rows
from .diagnostics import Diagnostic, error_messages, has_errors
from .errors import (
    AuthError,
    GroupPredicateError,
    PredicateParseError,
    SchemaViolationError,
    TransportError,
    UnknownFieldError,
)
from .predicate import parse_predicate_obj
from .scaffold import (
    Provenance,
    ScaffoldSet,
    SemanticScaffold,
    validate_scaffold_set,
)

DEFAULT_BASE_URL = "https://api.openai.com/v1"
API_KEY_ENV = "SCAFFOLD_LLM_API_KEY"
BASE_URL_ENV = "SCAFFOLD_LLM_BASE_URL"


def default_fixtures_dir() -> Path:
    return Path(str(resources.files("datascaffold").joinpath("fixtures/llm")))


@dataclass(frozen=True)
class RemoteBackendConfig:
    base_url: Optional[str] = None  # falls back to env, then the public endpoint


@dataclass(frozen=True)
class MockBackendConfig:
    fixture_id: str
    fixtures_dir: Optional[Path] = None


BackendConfig = Union[RemoteBackendConfig, MockBackendConfig]


@dataclass(frozen=True)
class GenerationConfig:
    model: str = "gpt-4o-mini"
    temperature: float = 0.2
    max_repair_attempts: int = 2
    max_prompt_rows: int = 200
    backend: BackendConfig = dc_field(default_factory=RemoteBackendConfig)


@dataclass(frozen=True)
class Task:
    kind: str  # "bins" | "highlights"
    field: Optional[str] = None

    @staticmethod
    def bins(field: str) -> "Task":
        return Task("bins", field)

    @staticmethod
    def highlights() -> "Task":
        return Task("highlights")


@dataclass(frozen=True)
class PromptSpec:
    task: Task
    system: str
    user: str
    response_schema: dict


def _literal_schema() -> dict:
    return {"type": ["number", "string"]}


def _leaf_variant(op: str, value_schema: dict) -> dict:
    return {
        "type": "object",
        "properties": {"field": {"type": "string"}, op: value_schema},
        "required": ["field", op],
        "additionalProperties": False,
    }


def build_response_schema() -> dict:
    literal = _literal_schema()
    leaf_variants = [
        _leaf_variant(op, literal) for op in ("equal", "lt", "lte", "gt", "gte")
    ]
    leaf_variants.append(
        _leaf_variant(
            "range",
            {"type": "array", "items": literal, "minItems": 2, "maxItems": 2},
        )
    )
    leaf_variants.append(
        _leaf_variant("oneOf", {"type": "array", "items": literal, "minItems": 1})
    )
    leaf_variants.append(_leaf_variant("valid", {"type": "boolean"}))
    predicate_ref = {"$ref": "#/$defs/predicate"}
    return {
        "type": "object",
        "properties": {
            "groups": {
                "type": "array",
                "minItems": 1,
                "items": {"$ref": "#/$defs/group"},
            }
        },
        "required": ["groups"],
        "additionalProperties": False,
        "$defs": {
            "group": {
                "type": "object",
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "explanation": {"type": "string", "minLength": 1},
                    "predicate": predicate_ref,
                },
                "required": ["name", "explanation", "predicate"],
                "additionalProperties": False,
            },
            "predicate": {
                "anyOf": [
                    {"$ref": "#/$defs/fieldPredicate"},
                    {
                        "type": "object",
                        "properties": {"and": {"type": "array", "items": predicate_ref}},
                        "required": ["and"],
                        "additionalProperties": False,
                    },
                    {
                        "type": "object",
                        "properties": {"or": {"type": "array", "items": predicate_ref}},
                        "required": ["or"],
                        "additionalProperties": False,
                    },
                    {
                        "type": "object",
                        "properties": {"not": predicate_ref},
                        "required": ["not"],
                        "additionalProperties": False,
                    },
                ]
            },
            "fieldPredicate": {"anyOf": leaf_variants},
        },
    }


RESPONSE_SCHEMA = build_response_schema()


def _render_extent(spec) -> str:
    ext = extent_to_jsonable(spec)
    if spec.measure == "nominal":
        cats = ", ".join(f"{c['category']} ({c['count']})" for c in ext["categories"])
        return f"categories: {cats}"
    return f"extent {ext['min']} to {ext['max']}"


def _render_rows(d: Dataset, max_rows: int) -> str:
    rows = sample_rows(d, max_rows, seed=0)
    names = d.field_names()
    lines = [" | ".join(names)]
    for r in rows:
        cells = []
        for n in names:
            v = cell_to_jsonable(r[n])
            cells.append("" if v is None else str(v))
        lines.append(" | ".join(cells))
    return "\n".join(lines)


_SYSTEM = (
    "You are a data analyst who identifies meaningful groupings in tabular data. "
    "Respond only with JSON matching the requested schema: an object with a "
    '"groups" array whose entries each carry a short name, a longer explanation '
    "of the grouping's real-world meaning, and a query predicate giving the "
    "machine-checkable inclusion criteria."
)


def build_prompt(d: Dataset, task: Task, cfg: GenerationConfig) -> PromptSpec:
    """Deterministic prompt: schema summary, sampled rows, task constraints."""
    if task.kind == "bins":
        spec = d.field_spec(task.field)
        if spec is None:
            raise UnknownFieldError(f'dataset has no field "{task.field}"')

    field_lines = "\n".join(
        f"- {f.name} ({f.measure}), {_render_extent(f)}" for f in d.fields
    )
    shown = min(d.row_count, cfg.max_prompt_rows)
    sections = [
        f"Dataset {d.id} has {d.row_count} records and {len(d.fields)} fields.",
        f"Fields:\n{field_lines}",
        f"Data ({shown} of {d.row_count} rows):\n{_render_rows(d, cfg.max_prompt_rows)}",
    ]

    if task.kind == "highlights":
        sections.append(
            "Task: identify between 3 and 7 data highlights. A data highlight is a "
            "subset of records that corresponds to a meaningful real-world grouping; "
            "its query predicate may involve multiple fields. Give each highlight a "
            "short name and an explanation of its real-world meaning."
        )
    elif spec.measure == "nominal":
        cats = ", ".join(spec.extent.category_names())
        sections.append(
            f'Task: group the categories of the field "{task.field}" into higher-level '
            "groupings with meaningful names. The groupings must be mutually exclusive "
            f"and exhaustively cover all categories: {cats}. Express every predicate "
            f'over the field "{task.field}" only, using equal or oneOf.'
        )
    else:
        ext = extent_to_jsonable(spec)
        sections.append(
            f'Task: divide the field "{task.field}" ({spec.measure}, extent '
            f"{ext['min']} to {ext['max']}) into bins named after domain-meaningful "
            "concepts. The bins must be non-overlapping intervals that cover the "
            "extent of the data. Express every predicate over the field "
            f'"{task.field}" only, as a range or as a conjunction of one lower (gte) '
            "and one upper (lt or lte) bound. Return as many bins as the domain "
            "naturally suggests."
        )
    return PromptSpec(
        task=task,
        system=_SYSTEM,
        user="\n\n".join(sections),
        response_schema=RESPONSE_SCHEMA,
    )


REPAIR_HEADER = "Your previous response had these problems:"


def repair_prompt(base: PromptSpec, problems: list[str]) -> PromptSpec:
    bullets = "\n".join(f"- {p}" for p in problems)
    user = (
        f"{base.user}\n\n{REPAIR_HEADER}\n{bullets}\n"
        "Return a corrected response that fixes every problem."
    )
    return replace(base, user=user)


class MockBackend:
    """Replays canned response bodies from ``<fixtures_dir>/<fixture_id>.json``.

    The file holds an ordered list of bodies; each call consumes the next and
    the final body repeats once the list is exhausted. Received prompts are
    recorded for inspection.
    """

    def __init__(self, fixture_id: str, fixtures_dir: Optional[Path] = None):
        directory = Path(fixtures_dir) if fixtures_dir else default_fixtures_dir()
        path = directory / f"{fixture_id}.json"
        if not path.is_file():
            raise TransportError(f"mock fixture {fixture_id!r} not found in {directory}")
        bodies = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(bodies, list) or not bodies:
            raise TransportError(f"mock fixture {fixture_id!r} must be a non-empty array")
        self.fixture_id = fixture_id
        self._bodies = bodies
        self._cursor = 0
        self.prompts: list[PromptSpec] = []

    def complete(self, prompt: PromptSpec, cfg: GenerationConfig) -> dict:
        self.prompts.append(prompt)
        body = self._bodies[min(self._cursor, len(self._bodies) - 1)]
        self._cursor += 1
        return body


class RemoteBackend:
    """Chat-completions client with a JSON-schema response format."""

    def __init__(self, base_url: Optional[str] = None, timeout: float = 60.0):
        self.base_url = (
            base_url or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL
        ).rstrip("/")
        self.timeout = timeout

    def complete(self, prompt: PromptSpec, cfg: GenerationConfig) -> dict:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "response_format": {
                "type": "json_schema",
                "json_schema": {
                    "name": "data_groupings",
                    "schema": prompt.response_schema,
                    "strict": True,
                },
            },
        }
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                headers=headers,
                json=payload,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"backend request failed: {exc}") from exc
        if response.status_code in (401, 403):
            raise AuthError(f"backend rejected credentials (HTTP {response.status_code})")
        if response.status_code >= 400:
            raise TransportError(
                f"backend returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError) as exc:
            raise TransportError(f"malformed completion envelope: {exc}") from exc
        try:
            return json.loads(content)
        except json.JSONDecodeError as exc:
            raise SchemaViolationError(f"response content is not JSON: {exc}") from exc


Backend = Union[MockBackend, RemoteBackend]


def make_backend(cfg: GenerationConfig) -> Backend:
    if isinstance(cfg.backend, MockBackendConfig):
        return MockBackend(cfg.backend.fixture_id, cfg.backend.fixtures_dir)
    return RemoteBackend(cfg.backend.base_url)


def _parse_response(body: dict, task: Task, provenance: Provenance) -> ScaffoldSet:
    try:
        jsonschema.validate(body, RESPONSE_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise SchemaViolationError(f"response violates schema at {path}: {exc.message}")
    groups = []
    for index, entry in enumerate(body["groups"]):
        try:
            predicate = parse_predicate_obj(entry["predicate"])
        except PredicateParseError as exc:
            raise GroupPredicateError(index, exc) from exc
        groups.append(
            SemanticScaffold(
                name=entry["name"],
                explanation=entry["explanation"],
                predicate=predicate,
            )
        )
    return ScaffoldSet(
        kind=task.kind,
        groups=tuple(groups),
        field=task.field,
        provenance=provenance,
    )


def generate(
    prompt: PromptSpec, cfg: GenerationConfig, backend: Optional[Backend] = None
) -> ScaffoldSet:
    """Single round trip: send the prompt, enforce the response schema,
    parse every group's predicate."""
    backend = backend or make_backend(cfg)
    body = backend.complete(prompt, cfg)
    provenance = Provenance("llm", model=cfg.model, attempts=1)
    return _parse_response(body, prompt.task, provenance)


def generate_validated(
    d: Dataset,
    task: Task,
    cfg: GenerationConfig,
    backend: Optional[Backend] = None,
) -> tuple[ScaffoldSet, list[Diagnostic], int]:
    """Generate, validate, and re-prompt on error-severity findings.

    Each retry appends every error message from the previous round verbatim.
    Warnings never retry; running out of attempts is not an error, the caller
    receives the final set together with its diagnostics.
    """
    backend = backend or make_backend(cfg)
    base_prompt = build_prompt(d, task, cfg)
    attempts_allowed = 1 + max(0, cfg.max_repair_attempts)

    scaffold_set: ScaffoldSet
    diags: list[Diagnostic] = []
    problems: list[str] = []
    for attempt in range(1, attempts_allowed + 1):
        prompt = repair_prompt(base_prompt, problems) if problems else base_prompt
        body = backend.complete(prompt, cfg)
        provenance = Provenance("llm", model=cfg.model, attempts=attempt)
        scaffold_set = _parse_response(body, task, provenance)
        diags = validate_scaffold_set(scaffold_set, d)
        if not has_errors(diags):
            return scaffold_set, diags, attempt
        problems = error_messages(diags)
    return scaffold_set, diags, attempts_allowed
