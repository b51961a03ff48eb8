import type {
  BinMode,
  FieldSummary,
  GenerateRequest,
  Predicate,
  ScaffoldResponse,
  SelectionResult,
  StructureNode,
} from "./types.js";

// The UI talks to the service only through these five calls; tests inject a
// fake that replays recorded responses.
export interface Api {
  getDataset(datasetId: string): Promise<FieldSummary>;
  uploadDataset(content: string, format: "csv" | "json-records"): Promise<FieldSummary>;
  getStructure(datasetId: string, binMode: BinMode): Promise<StructureNode>;
  generateScaffolds(datasetId: string, request: GenerateRequest): Promise<ScaffoldResponse>;
  select(datasetId: string, predicate: Predicate, page: number): Promise<SelectionResult>;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = await response.json();
      if (body.error) detail = String(body.error);
      else if (Array.isArray(body.diagnostics) && body.diagnostics.length > 0) {
        detail = body.diagnostics.map((d: { message: string }) => d.message).join("; ");
      }
    } catch {
      // body was not JSON; keep the status text
    }
    throw new ApiError(detail, response.status);
  }
  return response.json() as Promise<T>;
}

export class HttpApi implements Api {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  getDataset(datasetId: string): Promise<FieldSummary> {
    return fetch(this.url(`/api/datasets/${datasetId}`)).then((r) =>
      parseOrThrow<FieldSummary>(r),
    );
  }

  uploadDataset(content: string, format: "csv" | "json-records"): Promise<FieldSummary> {
    return fetch(this.url("/api/datasets"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ content, format }),
    }).then((r) => parseOrThrow<FieldSummary>(r));
  }

  getStructure(datasetId: string, binMode: BinMode): Promise<StructureNode> {
    const suffix = binMode === "equalWidth" ? "?binMode=equalWidth" : "";
    return fetch(this.url(`/api/datasets/${datasetId}/structure${suffix}`)).then((r) =>
      parseOrThrow<StructureNode>(r),
    );
  }

  generateScaffolds(datasetId: string, request: GenerateRequest): Promise<ScaffoldResponse> {
    return fetch(this.url(`/api/datasets/${datasetId}/scaffolds`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }).then((r) => parseOrThrow<ScaffoldResponse>(r));
  }

  select(datasetId: string, predicate: Predicate, page: number): Promise<SelectionResult> {
    const suffix = page > 0 ? `?page=${page}` : "";
    return fetch(this.url(`/api/datasets/${datasetId}/selection${suffix}`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(predicate),
    }).then((r) => parseOrThrow<SelectionResult>(r));
  }
}

// Record pages are capped at pageSize rows; pull pages until the whole
// selection is assembled so the table can show every matching record.
export async function fetchAllRows(
  api: Api,
  datasetId: string,
  predicate: Predicate,
): Promise<SelectionResult & { rows: SelectionResult["rowsPage"] }> {
  const first = await api.select(datasetId, predicate, 0);
  const rows = [...first.rowsPage];
  let page = 1;
  while (rows.length < first.count) {
    const next = await api.select(datasetId, predicate, page);
    if (next.rowsPage.length === 0) break;
    rows.push(...next.rowsPage);
    page += 1;
  }
  return { ...first, rows };
}
