import type { BinMode, StructureNode } from "./types.js";

export interface ViewState {
  datasetId: string;
  focusNodeId: string;
  expandedNodeIds: Set<string>;
  activeHighlightId: string | null;
  binMode: BinMode;
  pendingGeneration: boolean;
}

export function initialState(datasetId: string, root: StructureNode): ViewState {
  return {
    datasetId,
    focusNodeId: root.id,
    expandedNodeIds: new Set([root.id]),
    activeHighlightId: null,
    binMode: "semantic",
    pendingGeneration: false,
  };
}

// Flat index of the tree so navigation logic stays pure and testable.
export interface TreeIndex {
  root: StructureNode;
  byId: Map<string, StructureNode>;
  parent: Map<string, string | null>;
  level: Map<string, number>;
  position: Map<string, number>; // 1-based among siblings
  setSize: Map<string, number>;
}

export function indexTree(root: StructureNode): TreeIndex {
  const index: TreeIndex = {
    root,
    byId: new Map(),
    parent: new Map(),
    level: new Map(),
    position: new Map(),
    setSize: new Map(),
  };
  const visit = (node: StructureNode, parent: string | null, level: number, pos: number, size: number) => {
    index.byId.set(node.id, node);
    index.parent.set(node.id, parent);
    index.level.set(node.id, level);
    index.position.set(node.id, pos);
    index.setSize.set(node.id, size);
    node.children.forEach((child, i) =>
      visit(child, node.id, level + 1, i + 1, node.children.length),
    );
  };
  visit(root, null, 1, 1, 1);
  return index;
}

export function depthFirstIds(root: StructureNode): string[] {
  const out: string[] = [];
  const visit = (node: StructureNode) => {
    out.push(node.id);
    node.children.forEach(visit);
  };
  visit(root);
  return out;
}

function siblings(index: TreeIndex, id: string): StructureNode[] {
  const parentId = index.parent.get(id) ?? null;
  if (parentId === null) return [index.root];
  return index.byId.get(parentId)?.children ?? [];
}

export type NavKey = "ArrowDown" | "ArrowUp" | "ArrowRight" | "ArrowLeft" | "Enter";

export interface NavResult {
  state: ViewState;
  // set when Enter lands on a highlight node: the app activates it
  activated: StructureNode | null;
}

// Down/Up move among siblings; Right expands, then enters the children;
// Left collapses, then exits to the parent; Enter activates a highlight.
export function handleKey(index: TreeIndex, state: ViewState, key: NavKey): NavResult {
  const node = index.byId.get(state.focusNodeId);
  if (!node) return { state, activated: null };

  const focus = (id: string): ViewState => ({ ...state, focusNodeId: id });

  if (key === "ArrowDown" || key === "ArrowUp") {
    const peers = siblings(index, node.id);
    const at = peers.findIndex((p) => p.id === node.id);
    const target = peers[key === "ArrowDown" ? at + 1 : at - 1];
    return { state: target ? focus(target.id) : state, activated: null };
  }

  if (key === "ArrowRight") {
    if (node.children.length === 0) return { state, activated: null };
    if (!state.expandedNodeIds.has(node.id)) {
      const expanded = new Set(state.expandedNodeIds);
      expanded.add(node.id);
      return { state: { ...state, expandedNodeIds: expanded }, activated: null };
    }
    const first = node.children[0];
    return { state: first ? focus(first.id) : state, activated: null };
  }

  if (key === "ArrowLeft") {
    if (state.expandedNodeIds.has(node.id) && node.children.length > 0) {
      const expanded = new Set(state.expandedNodeIds);
      expanded.delete(node.id);
      return { state: { ...state, expandedNodeIds: expanded }, activated: null };
    }
    const parentId = index.parent.get(node.id);
    return { state: parentId ? focus(parentId) : state, activated: null };
  }

  // Enter
  if (node.kind === "highlight") {
    return {
      state: { ...state, activeHighlightId: node.id },
      activated: node,
    };
  }
  return { state, activated: null };
}

// After a regeneration or bin-mode toggle the node ids change; keep the
// reader's place by matching the focused label in the fresh tree.
export function refocusByLabel(
  newRoot: StructureNode,
  oldIndex: TreeIndex,
  state: ViewState,
): string {
  const oldNode = oldIndex.byId.get(state.focusNodeId);
  if (!oldNode) return newRoot.id;
  let found: string | null = null;
  const visit = (node: StructureNode) => {
    if (found === null && node.label === oldNode.label) found = node.id;
    node.children.forEach(visit);
  };
  visit(newRoot);
  return found ?? newRoot.id;
}

export function announcementFor(node: StructureNode): string {
  return `${node.label} — ${node.description}`;
}
