import type { Api } from "./api.js";
import { ApiError, fetchAllRows } from "./api.js";
import {
  announcementFor,
  handleKey,
  indexTree,
  initialState,
  refocusByLabel,
  type NavKey,
  type TreeIndex,
  type ViewState,
} from "./state.js";
import { renderControls, type Controls } from "./controls.js";
import { focusedElement, renderTree } from "./tree.js";
import { clearTable, renderTable } from "./table.js";
import type { FieldSummary, StructureNode } from "./types.js";

const NAV_KEYS = new Set(["ArrowDown", "ArrowUp", "ArrowRight", "ArrowLeft", "Enter"]);

export interface App {
  state: ViewState;
  index: TreeIndex;
  pressKey(key: NavKey): Promise<void>;
  generateHighlights(mockFixture?: string): Promise<void>;
  generateBins(field: string, mockFixture?: string): Promise<void>;
  toggleBinMode(): Promise<void>;
  refresh(): Promise<void>;
  elements: {
    tree: HTMLElement;
    table: HTMLElement;
    status: HTMLElement;
    error: HTMLElement;
    controls: HTMLElement;
  };
}

function skeleton(container: HTMLElement) {
  const doc = container.ownerDocument;
  container.textContent = "";

  const status = doc.createElement("div");
  status.id = "status";
  status.setAttribute("role", "status");
  status.setAttribute("aria-live", "polite");
  container.appendChild(status);

  const error = doc.createElement("div");
  error.id = "error";
  error.setAttribute("role", "alert");
  error.hidden = true;
  const errorText = doc.createElement("span");
  errorText.id = "error-text";
  error.appendChild(errorText);
  const dismiss = doc.createElement("button");
  dismiss.type = "button";
  dismiss.id = "dismiss-error";
  dismiss.textContent = "Dismiss";
  dismiss.addEventListener("click", () => {
    error.hidden = true;
    errorText.textContent = "";
  });
  error.appendChild(dismiss);
  container.appendChild(error);

  const controls = doc.createElement("div");
  controls.id = "controls";
  container.appendChild(controls);

  const tree = doc.createElement("div");
  tree.id = "tree";
  container.appendChild(tree);

  const table = doc.createElement("div");
  table.id = "table";
  container.appendChild(table);

  return { status, error, errorText, controls, tree, table };
}

export async function createApp(
  container: HTMLElement,
  api: Api,
  datasetId: string,
  options: { mockFixture?: string } = {},
): Promise<App> {
  const elements = skeleton(container);
  const summary: FieldSummary = await api.getDataset(datasetId);
  let root: StructureNode = await api.getStructure(datasetId, "semantic");
  let index = indexTree(root);
  let state = initialState(datasetId, root);

  const announce = (text: string) => {
    elements.status.textContent = text;
  };
  const showError = (text: string) => {
    elements.errorText.textContent = text;
    elements.error.hidden = false;
  };

  let controls: Controls;

  const render = (moveFocus: boolean) => {
    renderTree(elements.tree, index, state, {
      onFocus: (nodeId) => {
        if (state.focusNodeId !== nodeId) {
          state = { ...state, focusNodeId: nodeId };
          const node = index.byId.get(nodeId);
          if (node) announce(announcementFor(node));
          render(false);
        }
      },
      onKey: (event) => {
        if (!NAV_KEYS.has(event.key)) return;
        event.preventDefault();
        void app.pressKey(event.key as NavKey);
      },
    });
    controls.setBinMode(state.binMode);
    controls.setPending(state.pendingGeneration);
    if (moveFocus) focusedElement(elements.tree, state)?.focus();
  };

  const replaceTree = (newRoot: StructureNode) => {
    const focusId = refocusByLabel(newRoot, index, state);
    root = newRoot;
    index = indexTree(root);
    const expanded = new Set(
      [...state.expandedNodeIds].filter((id) => index.byId.has(id)),
    );
    expanded.add(root.id);
    const active =
      state.activeHighlightId && index.byId.has(state.activeHighlightId)
        ? state.activeHighlightId
        : null;
    state = {
      ...state,
      focusNodeId: focusId,
      expandedNodeIds: expanded,
      activeHighlightId: active,
    };
  };

  const activateHighlight = async (node: StructureNode) => {
    if (!node.predicate) return;
    try {
      const selection = await fetchAllRows(api, datasetId, node.predicate);
      renderTable(
        elements.table,
        node.label,
        summary.fields.map((f) => f.name),
        selection.rows,
        selection.count,
      );
      announce(`${node.label} — ${selection.count} records shown in the record table.`);
    } catch (err) {
      showError(`Could not load the selection: ${describe(err)}`);
    }
  };

  const generate = async (request: Parameters<Api["generateScaffolds"]>[1]) => {
    if (state.pendingGeneration) return;
    state = { ...state, pendingGeneration: true };
    render(false);
    announce("Generating…");
    try {
      const response = await api.generateScaffolds(datasetId, request);
      const fresh = await api.getStructure(datasetId, state.binMode);
      replaceTree(fresh);
      const warnings = response.diagnostics.filter((d) => d.severity === "warning").length;
      const errors = response.diagnostics.filter((d) => d.severity === "error").length;
      if (errors > 0) {
        announce(
          `Generation finished with ${errors} unresolved problem${errors === 1 ? "" : "s"}; ` +
            "the structure is unchanged.",
        );
      } else {
        announce(
          `Generation complete after ${response.attemptsUsed} attempt` +
            `${response.attemptsUsed === 1 ? "" : "s"}` +
            (warnings > 0 ? `, ${warnings} warning${warnings === 1 ? "" : "s"} to review.` : "."),
        );
      }
    } catch (err) {
      // the tree keeps its previous content; the reader just hears what failed
      showError(`Generation failed: ${describe(err)}`);
    } finally {
      state = { ...state, pendingGeneration: false };
      render(true);
    }
  };

  const app: App = {
    get state() {
      return state;
    },
    get index() {
      return index;
    },
    elements: {
      tree: elements.tree,
      table: elements.table,
      status: elements.status,
      error: elements.error,
      controls: elements.controls,
    },

    async pressKey(key: NavKey): Promise<void> {
      const result = handleKey(index, state, key);
      const focusChanged = result.state.focusNodeId !== state.focusNodeId;
      state = result.state;
      if (focusChanged) {
        const node = index.byId.get(state.focusNodeId);
        if (node) announce(announcementFor(node));
      }
      render(true);
      if (result.activated) await activateHighlight(result.activated);
    },

    generateHighlights(mockFixture?: string): Promise<void> {
      return generate({
        kind: "highlights",
        ...(mockFixture ?? options.mockFixture
          ? { mockFixture: mockFixture ?? options.mockFixture }
          : {}),
      });
    },

    generateBins(field: string, mockFixture?: string): Promise<void> {
      return generate({
        kind: "bins",
        field,
        ...(mockFixture ?? options.mockFixture
          ? { mockFixture: mockFixture ?? options.mockFixture }
          : {}),
      });
    },

    async toggleBinMode(): Promise<void> {
      const next = state.binMode === "semantic" ? "equalWidth" : "semantic";
      try {
        const fresh = await api.getStructure(datasetId, next);
        state = { ...state, binMode: next };
        replaceTree(fresh);
        render(true);
        announce(
          next === "equalWidth"
            ? "Showing conventional equal-width bins."
            : "Showing semantic bins.",
        );
      } catch (err) {
        showError(`Could not switch bin mode: ${describe(err)}`);
      }
    },

    async refresh(): Promise<void> {
      const fresh = await api.getStructure(datasetId, state.binMode);
      replaceTree(fresh);
      render(true);
    },
  };

  controls = renderControls(elements.controls, summary.fields, {
    generateHighlights: () => void app.generateHighlights(),
    generateBins: (field) => void app.generateBins(field),
    toggleBinMode: () => void app.toggleBinMode(),
  });

  render(true);
  announce(announcementFor(root));
  clearTable(elements.table, "Activate a highlight to see its records here.");
  return app;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.message} (HTTP ${err.status})`;
  if (err instanceof Error) return err.message;
  return String(err);
}
