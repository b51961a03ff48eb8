import type { Diagnostic, StructureNode } from "./types.js";
import type { TreeIndex, ViewState } from "./state.js";
import { announcementFor } from "./state.js";

export interface TreeCallbacks {
  onFocus(nodeId: string): void;
  onKey(event: KeyboardEvent): void;
}

// Warnings render as a disclosure inside the tree item they concern, so a
// reader meets them exactly where the generated content sits.
function diagnosticsDisclosure(doc: Document, diagnostics: Diagnostic[]): HTMLElement {
  const details = doc.createElement("details");
  details.className = "diagnostics";
  const summary = doc.createElement("summary");
  const warnings = diagnostics.filter((d) => d.severity === "warning").length;
  const total = diagnostics.length;
  const counted = warnings === total ? warnings : total;
  summary.textContent = `AI-generated content — ${counted} warning${counted === 1 ? "" : "s"}`;
  details.appendChild(summary);
  const list = doc.createElement("ul");
  for (const diagnostic of diagnostics) {
    const item = doc.createElement("li");
    item.className = `diagnostic diagnostic-${diagnostic.severity}`;
    item.textContent = `${diagnostic.code}: ${diagnostic.message}`;
    list.appendChild(item);
  }
  details.appendChild(list);
  return details;
}

function renderItem(
  doc: Document,
  node: StructureNode,
  index: TreeIndex,
  state: ViewState,
  callbacks: TreeCallbacks,
): HTMLLIElement {
  const item = doc.createElement("li");
  item.setAttribute("role", "treeitem");
  item.id = `node-${node.id}`;
  item.dataset.nodeId = node.id;
  item.dataset.kind = node.kind;
  item.setAttribute("aria-level", String(index.level.get(node.id)));
  item.setAttribute("aria-posinset", String(index.position.get(node.id)));
  item.setAttribute("aria-setsize", String(index.setSize.get(node.id)));
  item.setAttribute("aria-label", announcementFor(node));
  item.tabIndex = state.focusNodeId === node.id ? 0 : -1;

  const row = doc.createElement("div");
  row.className = "node-row";
  const label = doc.createElement("span");
  label.className = "node-label";
  label.textContent = node.label;
  row.appendChild(label);
  const description = doc.createElement("span");
  description.className = "node-description";
  description.textContent = node.description;
  row.appendChild(description);
  if (node.id === state.activeHighlightId) {
    item.setAttribute("aria-current", "true");
    const badge = doc.createElement("span");
    badge.className = "active-badge";
    badge.textContent = "(active)";
    row.appendChild(badge);
  }
  item.appendChild(row);

  if (node.diagnostics.length > 0) {
    item.appendChild(diagnosticsDisclosure(doc, node.diagnostics));
  }

  if (node.children.length > 0) {
    const expanded = state.expandedNodeIds.has(node.id);
    item.setAttribute("aria-expanded", expanded ? "true" : "false");
    if (expanded) {
      const group = doc.createElement("ul");
      group.setAttribute("role", "group");
      for (const child of node.children) {
        group.appendChild(renderItem(doc, child, index, state, callbacks));
      }
      item.appendChild(group);
    }
  }

  item.addEventListener("focus", (event) => {
    event.stopPropagation();
    callbacks.onFocus(node.id);
  });
  return item;
}

export function renderTree(
  container: HTMLElement,
  index: TreeIndex,
  state: ViewState,
  callbacks: TreeCallbacks,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const tree = doc.createElement("ul");
  tree.setAttribute("role", "tree");
  tree.setAttribute("aria-label", "Dataset structure");
  tree.appendChild(renderItem(doc, index.root, index, state, callbacks));
  tree.addEventListener("keydown", callbacks.onKey);
  container.appendChild(tree);
}

export function focusedElement(container: HTMLElement, state: ViewState): HTMLElement | null {
  // node ids are slash-delimited paths we mint ourselves; quoting suffices
  return container.querySelector<HTMLElement>(`[data-node-id="${state.focusNodeId}"]`);
}
