// Wire types mirroring the service's JSON contracts.

export type Predicate = Record<string, unknown>;

export interface Diagnostic {
  code: string;
  severity: "error" | "warning";
  message: string;
  groupIndex: number | null;
}

export type NodeKind =
  | "root"
  | "highlightList"
  | "highlight"
  | "field"
  | "bin"
  | "recordPage";

export interface StructureNode {
  id: string;
  kind: NodeKind;
  label: string;
  description: string;
  predicate: Predicate | null;
  selectionCount: number | null;
  diagnostics: Diagnostic[];
  children: StructureNode[];
}

export interface FieldInfo {
  name: string;
  measure: "nominal" | "quantitative" | "temporal";
  extent: Record<string, unknown>;
}

export interface FieldSummary {
  datasetId: string;
  rowCount: number;
  fields: FieldInfo[];
}

export type Cell = number | string | null;

export interface SelectionResult {
  count: number;
  rowIndices: number[];
  rowsPage: Record<string, Cell>[];
  pageSize: number;
}

export interface ScaffoldResponse {
  scaffolds: unknown;
  diagnostics: Diagnostic[];
  attemptsUsed: number;
}

export type BinMode = "semantic" | "equalWidth";

export interface GenerateRequest {
  kind: "bins" | "highlights";
  field?: string;
  mockFixture?: string;
}
