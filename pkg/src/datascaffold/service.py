"""HTTP service exposing the pipeline to scripts and the navigator UI.

All response bodies are canonical JSON (stable key order, no insignificant
whitespace), so repeated reads of an unchanged workspace are byte-identical.
The workspace lives in memory, guarded by a lock; scaffold writes replace
whole sets atomically, and an optional state directory persists one JSON
snapshot per dataset across restarts.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .dataset import (
    Dataset,
    MAX_INGEST_ROWS,
    cell_to_jsonable,
    field_summary,
    ingest,
    to_json_records,
)
from .diagnostics import Diagnostic, DiagnosticCode, has_errors
from .errors import (
    GatewayError,
    IngestError,
    PredicateParseError,
    TooManyRowsError,
    UnknownFieldError,
)
from .gateway import (
    GenerationConfig,
    MockBackendConfig,
    RemoteBackendConfig,
    Task,
    generate_validated,
)
from .predicate import parse_predicate_obj, select, typecheck
from .scaffold import (
    Provenance,
    ScaffoldSet,
    scaffold_groups_from_jsonable,
)
from .structure import build_structure, to_json

DEFAULT_PORT = 7341
SELECTION_PAGE_SIZE = 20


@dataclass(frozen=True)
class WorkspaceEntry:
    dataset: Dataset
    bin_sets: dict[str, ScaffoldSet] = dc_field(default_factory=dict)
    highlights: Optional[ScaffoldSet] = None


class Workspace:
    """Thread-safe dataset registry with optional on-disk snapshots."""

    def __init__(self, state_dir: Optional[Path] = None):
        self._entries: dict[str, WorkspaceEntry] = {}
        self._lock = threading.Lock()
        self._state_dir = state_dir
        if state_dir is not None:
            state_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(state_dir.glob("*.json")):
                self._load_snapshot(path)

    def get(self, dataset_id: str) -> Optional[WorkspaceEntry]:
        with self._lock:
            return self._entries.get(dataset_id)

    def put_dataset(self, dataset: Dataset) -> WorkspaceEntry:
        with self._lock:
            entry = self._entries.get(dataset.id)
            if entry is None:
                entry = WorkspaceEntry(dataset=dataset)
                self._entries[dataset.id] = entry
                self._persist(entry)
            return entry

    def set_scaffolds(
        self, dataset_id: str, task: Task, scaffold_set: ScaffoldSet
    ) -> Optional[WorkspaceEntry]:
        with self._lock:
            entry = self._entries.get(dataset_id)
            if entry is None:
                return None
            if task.kind == "bins":
                bin_sets = dict(entry.bin_sets)
                bin_sets[task.field] = scaffold_set
                entry = replace(entry, bin_sets=bin_sets)
            else:
                entry = replace(entry, highlights=scaffold_set)
            self._entries[dataset_id] = entry
            self._persist(entry)
            return entry

    def delete(self, dataset_id: str) -> bool:
        with self._lock:
            entry = self._entries.pop(dataset_id, None)
            if entry is None:
                return False
            if self._state_dir is not None:
                snapshot = self._state_dir / f"{dataset_id}.json"
                snapshot.unlink(missing_ok=True)
            return True

    # --- persistence ---

    def _persist(self, entry: WorkspaceEntry) -> None:
        if self._state_dir is None:
            return
        snapshot = {
            "datasetId": entry.dataset.id,
            "records": json.loads(to_json_records(entry.dataset)),
            "binSets": {
                name: s.to_jsonable() for name, s in sorted(entry.bin_sets.items())
            },
            "highlights": entry.highlights.to_jsonable() if entry.highlights else None,
        }
        path = self._state_dir / f"{entry.dataset.id}.json"
        path.write_text(json.dumps(snapshot, ensure_ascii=False), encoding="utf-8")

    def _load_snapshot(self, path: Path) -> None:
        obj = json.loads(path.read_text(encoding="utf-8"))
        data = json.dumps(obj["records"]).encode("utf-8")
        dataset = ingest(data, "json-records", dataset_id=obj["datasetId"])
        entry = WorkspaceEntry(dataset=dataset)
        for name, raw in obj.get("binSets", {}).items():
            entry.bin_sets[name] = _scaffold_set_from_jsonable(raw)
        highlights = obj.get("highlights")
        if highlights:
            entry = replace(entry, highlights=_scaffold_set_from_jsonable(highlights))
        self._entries[dataset.id] = entry


def _scaffold_set_from_jsonable(obj: dict) -> ScaffoldSet:
    prov = obj.get("provenance", {"kind": "manual"})
    return ScaffoldSet(
        kind=obj["kind"],
        groups=scaffold_groups_from_jsonable(obj),
        field=obj.get("field"),
        provenance=Provenance(
            kind=prov.get("kind", "manual"),
            model=prov.get("model"),
            attempts=prov.get("attempts"),
        ),
    )


def canonical_response(obj, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(obj, separators=(",", ":"), ensure_ascii=False),
        status_code=status_code,
        media_type="application/json",
    )


def _diagnostics_response(diags: list[Diagnostic], status_code: int) -> Response:
    return canonical_response(
        {"diagnostics": [d.to_jsonable() for d in diags]}, status_code
    )


def _bad_request(message: str) -> Response:
    diag = Diagnostic(DiagnosticCode.SCHEMA_VIOLATION, "error", message)
    return _diagnostics_response([diag], 400)


def _not_found(dataset_id: str) -> Response:
    return canonical_response({"error": f"unknown dataset {dataset_id!r}"}, 404)


def create_app(
    state_dir: Optional[Path] = None, fixtures_dir: Optional[Path] = None
) -> FastAPI:
    app = FastAPI(title="datascaffold", version="0.1.0")
    # the navigator page is served statically from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    workspace = Workspace(state_dir=state_dir)
    app.state.workspace = workspace

    async def read_json_body(request: Request):
        raw = await request.body()
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return None

    @app.post("/api/datasets")
    async def create_dataset(request: Request) -> Response:
        body = await read_json_body(request)
        if not isinstance(body, dict) or "content" not in body:
            return _bad_request('body must be a JSON object with "content" and "format"')
        fmt = body.get("format", "csv")
        if fmt not in ("csv", "json-records"):
            return _bad_request(f"unknown format {fmt!r}")
        try:
            dataset = ingest(str(body["content"]).encode("utf-8"), fmt)
        except TooManyRowsError as exc:
            return canonical_response({"error": str(exc)}, 413)
        except IngestError as exc:
            return _bad_request(f"cannot ingest dataset: {exc}")
        workspace.put_dataset(dataset)
        return canonical_response(field_summary(dataset))

    @app.get("/api/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str) -> Response:
        entry = workspace.get(dataset_id)
        if entry is None:
            return _not_found(dataset_id)
        return canonical_response(field_summary(entry.dataset))

    @app.post("/api/datasets/{dataset_id}/scaffolds")
    async def create_scaffolds(dataset_id: str, request: Request) -> Response:
        entry = workspace.get(dataset_id)
        if entry is None:
            return _not_found(dataset_id)
        body = await read_json_body(request)
        if not isinstance(body, dict) or body.get("kind") not in ("bins", "highlights"):
            return _bad_request('body must carry "kind": "bins" or "highlights"')
        if body["kind"] == "bins":
            field_name = body.get("field")
            if not field_name:
                return _bad_request('bins generation needs a "field"')
            if entry.dataset.field_spec(field_name) is None:
                return _diagnostics_response(
                    [
                        Diagnostic(
                            DiagnosticCode.UNKNOWN_FIELD,
                            "error",
                            f'dataset has no field "{field_name}"',
                        )
                    ],
                    400,
                )
            task = Task.bins(field_name)
        else:
            task = Task.highlights()

        if body.get("mockFixture"):
            backend = MockBackendConfig(str(body["mockFixture"]), fixtures_dir)
        else:
            backend = RemoteBackendConfig()
        cfg = GenerationConfig(
            model=body.get("model", GenerationConfig.model),
            temperature=body.get("temperature", GenerationConfig.temperature),
            max_repair_attempts=body.get(
                "maxRepairAttempts", GenerationConfig.max_repair_attempts
            ),
            max_prompt_rows=body.get("maxPromptRows", GenerationConfig.max_prompt_rows),
            backend=backend,
        )
        try:
            scaffold_set, diags, attempts = generate_validated(entry.dataset, task, cfg)
        except GatewayError as exc:
            return canonical_response({"error": f"backend failure: {exc}"}, 502)
        if not has_errors(diags):
            # only clean sets enter the workspace; the structure endpoint
            # must never see a set that failed validation
            workspace.set_scaffolds(dataset_id, task, scaffold_set)
        return canonical_response(
            {
                "scaffolds": scaffold_set.to_jsonable(),
                "diagnostics": [d.to_jsonable() for d in diags],
                "attemptsUsed": attempts,
            }
        )

    @app.get("/api/datasets/{dataset_id}/structure")
    async def get_structure(dataset_id: str, binMode: str = "semantic") -> Response:
        entry = workspace.get(dataset_id)
        if entry is None:
            return _not_found(dataset_id)
        bins = entry.bin_sets if binMode != "equalWidth" else {}
        root = build_structure(entry.dataset, bins=bins, highlights=entry.highlights)
        return Response(content=to_json(root), media_type="application/json")

    @app.post("/api/datasets/{dataset_id}/selection")
    async def post_selection(
        dataset_id: str, request: Request, page: int = 0
    ) -> Response:
        entry = workspace.get(dataset_id)
        if entry is None:
            return _not_found(dataset_id)
        body = await read_json_body(request)
        if body is None:
            return _bad_request("body must be a predicate JSON object")
        try:
            predicate = parse_predicate_obj(body)
        except PredicateParseError as exc:
            return _bad_request(f"bad predicate: {exc}")
        diags = typecheck(predicate, entry.dataset.fields)
        if has_errors(diags):
            return _diagnostics_response(diags, 400)
        selection = select(predicate, entry.dataset)
        start = max(0, page) * SELECTION_PAGE_SIZE
        page_indices = selection.row_indices[start : start + SELECTION_PAGE_SIZE]
        names = entry.dataset.field_names()
        rows_page = [
            {name: cell_to_jsonable(entry.dataset.records[i][name]) for name in names}
            for i in page_indices
        ]
        return canonical_response(
            {
                "count": selection.count,
                "rowIndices": list(selection.row_indices),
                "rowsPage": rows_page,
                "pageSize": SELECTION_PAGE_SIZE,
            }
        )

    @app.delete("/api/datasets/{dataset_id}")
    async def delete_dataset(dataset_id: str) -> Response:
        if not workspace.delete(dataset_id):
            return _not_found(dataset_id)
        return Response(status_code=204)

    return app
