// Test double for the service: replays response bodies recorded from the
// real HTTP API (the UI's only contract with the backend).

import type { Api } from "../src/api.js";
import type {
  BinMode,
  FieldSummary,
  GenerateRequest,
  Predicate,
  ScaffoldResponse,
  SelectionResult,
  StructureNode,
} from "../src/types.js";

import carsSummary from "./fixtures/cars_summary.json";
import carsStructure from "./fixtures/cars_structure.json";
import carsStructureEqualWidth from "./fixtures/cars_structure_equalwidth.json";
import teaserPage0 from "./fixtures/cars_selection_teaser_p0.json";
import teaserPage1 from "./fixtures/cars_selection_teaser_p1.json";

export interface FakeApiOptions {
  summary?: FieldSummary;
  structures?: Partial<Record<BinMode, StructureNode>>;
  selections?: SelectionResult[]; // indexed by page
  generateResult?: ScaffoldResponse | (() => Promise<ScaffoldResponse>);
  structureAfterGenerate?: StructureNode;
}

export class FakeApi implements Api {
  calls: { method: string; args: unknown[] }[] = [];
  private structures: Partial<Record<BinMode, StructureNode>>;
  private generated = false;

  constructor(private readonly options: FakeApiOptions = {}) {
    this.structures = options.structures ?? {
      semantic: carsStructure as unknown as StructureNode,
      equalWidth: carsStructureEqualWidth as unknown as StructureNode,
    };
  }

  private log(method: string, ...args: unknown[]) {
    this.calls.push({ method, args });
  }

  async getDataset(datasetId: string): Promise<FieldSummary> {
    this.log("getDataset", datasetId);
    return (this.options.summary ?? (carsSummary as unknown as FieldSummary));
  }

  async uploadDataset(content: string, format: string): Promise<FieldSummary> {
    this.log("uploadDataset", format);
    return (this.options.summary ?? (carsSummary as unknown as FieldSummary));
  }

  async getStructure(datasetId: string, binMode: BinMode): Promise<StructureNode> {
    this.log("getStructure", datasetId, binMode);
    if (this.generated && this.options.structureAfterGenerate && binMode === "semantic") {
      return this.options.structureAfterGenerate;
    }
    const structure = this.structures[binMode];
    if (!structure) throw new Error(`no fixture for binMode=${binMode}`);
    return structure;
  }

  async generateScaffolds(
    datasetId: string,
    request: GenerateRequest,
  ): Promise<ScaffoldResponse> {
    this.log("generateScaffolds", datasetId, request);
    const result = this.options.generateResult;
    if (result === undefined) {
      return { scaffolds: {}, diagnostics: [], attemptsUsed: 1 };
    }
    const response = typeof result === "function" ? await result() : result;
    this.generated = true;
    return response;
  }

  async select(
    datasetId: string,
    predicate: Predicate,
    page: number,
  ): Promise<SelectionResult> {
    this.log("select", datasetId, predicate, page);
    const pages =
      this.options.selections ??
      ([teaserPage0, teaserPage1] as unknown as SelectionResult[]);
    const result = pages[page];
    if (!result) {
      const empty = pages[0]!;
      return { ...empty, rowsPage: [] };
    }
    return result;
  }
}

export function fixtureStructure(): StructureNode {
  return carsStructure as unknown as StructureNode;
}

export function fixtureEqualWidthStructure(): StructureNode {
  return carsStructureEqualWidth as unknown as StructureNode;
}

export function teaserCount(): number {
  return (teaserPage0 as unknown as SelectionResult).count;
}

export function makeContainer(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}
