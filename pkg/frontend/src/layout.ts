/**
 * Layered top-down layout for the case graph.
 *
 * Goals are pinned to the top row; everything that supports or evidences a
 * node sits strictly below it; context elements sit beside the node they
 * contextualize and warrants beside the source of the link they warrant;
 * elements that reach no goal settle at the bottom. The layout is a pure
 * function of the document: the same payload always yields the same picture.
 */

import type { CaseDocument, ElementPayload, LinkPayload } from "./types.js";

export const NODE_WIDTH = 172;
export const NODE_HEIGHT = 76;
export const H_GAP = 36;
export const V_GAP = 72;
export const MARGIN = 24;

export interface LayoutNode {
  id: string;
  element: ElementPayload;
  row: number;
  col: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface GraphLayout {
  nodes: LayoutNode[];
  nodesById: Map<string, LayoutNode>;
  links: LinkPayload[];
  width: number;
  height: number;
}

/** Links that impose a vertical order: the `from` side argues for the `to` side. */
const ARGUMENT_KINDS = new Set(["supports", "evidences"]);

export function layoutCase(doc: CaseDocument): GraphLayout {
  const elements = [...doc.elements].sort((a, b) => compare(a.id, b.id));
  const byId = new Map(elements.map((e) => [e.id, e]));
  const links = [...doc.links].sort((a, b) => compare(a.id, b.id));

  const rows = assignRows(elements, byId, links);
  const columns = assignColumns(elements, byId, links, rows);

  const nodes: LayoutNode[] = [];
  const nodesById = new Map<string, LayoutNode>();
  const rowWidths = new Map<number, number>();
  for (const [id, row] of rows) {
    void id;
    rowWidths.set(row, (rowWidths.get(row) ?? 0) + 1);
  }
  const maxPerRow = Math.max(1, ...rowWidths.values());
  const fullWidth = maxPerRow * NODE_WIDTH + (maxPerRow - 1) * H_GAP;

  let maxRow = 0;
  for (const element of elements) {
    const row = rows.get(element.id) ?? 0;
    const col = columns.get(element.id) ?? 0;
    maxRow = Math.max(maxRow, row);
    const inRow = rowWidths.get(row) ?? 1;
    const rowWidth = inRow * NODE_WIDTH + (inRow - 1) * H_GAP;
    const offset = (fullWidth - rowWidth) / 2;
    const node: LayoutNode = {
      id: element.id,
      element,
      row,
      col,
      x: MARGIN + offset + col * (NODE_WIDTH + H_GAP),
      y: MARGIN + row * (NODE_HEIGHT + V_GAP),
      width: NODE_WIDTH,
      height: NODE_HEIGHT,
    };
    nodes.push(node);
    nodesById.set(node.id, node);
  }

  return {
    nodes,
    nodesById,
    links,
    width: fullWidth + 2 * MARGIN,
    height: (maxRow + 1) * NODE_HEIGHT + maxRow * V_GAP + 2 * MARGIN,
  };
}

function assignRows(
  elements: ElementPayload[],
  byId: Map<string, ElementPayload>,
  links: LinkPayload[],
): Map<string, number> {
  const linksById = new Map(links.map((l) => [l.id, l]));

  // Upward argument edges: an element's row is one below the deepest thing
  // it argues for. Warrants hang off a link, contexts off an element; both
  // resolve to "same row as" anchors handled after the main pass.
  const arguesFor = new Map<string, string[]>();
  for (const link of links) {
    if (!ARGUMENT_KINDS.has(link.kind)) continue;
    if (!byId.has(link.from) || !byId.has(link.to)) continue;
    const targets = arguesFor.get(link.from);
    if (targets) targets.push(link.to);
    else arguesFor.set(link.from, [link.to]);
  }

  const rows = new Map<string, number>();
  const inProgress = new Set<string>();

  const rowOf = (id: string): number => {
    const known = rows.get(id);
    if (known !== undefined) return known;
    const element = byId.get(id);
    if (!element) return 0;
    if (element.kind === "Goal") {
      rows.set(id, 0);
      return 0;
    }
    if (inProgress.has(id)) return 0; // cycle guard: break the loop, stay total
    inProgress.add(id);
    let row = -1;
    for (const target of arguesFor.get(id) ?? []) {
      row = Math.max(row, rowOf(target) + 1);
    }
    inProgress.delete(id);
    if (row >= 0) rows.set(id, row);
    return row >= 0 ? row : 0;
  };

  for (const element of elements) {
    if (element.kind === "Goal" || arguesFor.has(element.id)) rowOf(element.id);
  }

  // Side anchors: context beside its element, warrant beside the source of
  // the link it warrants. Only fills gaps — an element already rowed by the
  // argument pass keeps its place.
  for (const link of links) {
    if (rows.has(link.from) || !byId.has(link.from)) continue;
    if (link.kind === "contextOf") {
      const anchor = rows.get(link.to);
      if (anchor !== undefined) rows.set(link.from, anchor);
    } else if (link.kind === "warrants") {
      const warranted = linksById.get(link.to);
      const anchor = warranted ? rows.get(warranted.from) : undefined;
      if (anchor !== undefined) rows.set(link.from, anchor);
    }
  }

  // Anything still unplaced is disconnected from every goal: park it below.
  const bottom = rows.size > 0 ? Math.max(...rows.values()) + 1 : 0;
  for (const element of elements) {
    if (!rows.has(element.id)) rows.set(element.id, bottom);
  }
  return rows;
}

function assignColumns(
  elements: ElementPayload[],
  byId: Map<string, ElementPayload>,
  links: LinkPayload[],
  rows: Map<string, number>,
): Map<string, number> {
  const linksById = new Map(links.map((l) => [l.id, l]));

  // For ordering, each element leans toward its anchors in rows above:
  // argument targets, the element a context annotates, or the source of a
  // warranted link.
  const anchors = new Map<string, string[]>();
  const lean = (id: string, anchor: string) => {
    const list = anchors.get(id);
    if (list) list.push(anchor);
    else anchors.set(id, [anchor]);
  };
  for (const link of links) {
    if (!byId.has(link.from)) continue;
    if (ARGUMENT_KINDS.has(link.kind) && byId.has(link.to)) {
      lean(link.from, link.to);
    } else if (link.kind === "contextOf" && byId.has(link.to)) {
      lean(link.from, link.to);
    } else if (link.kind === "warrants") {
      const warranted = linksById.get(link.to);
      if (warranted && byId.has(warranted.from)) lean(link.from, warranted.from);
    }
  }

  const byRow = new Map<number, ElementPayload[]>();
  for (const element of elements) {
    const row = rows.get(element.id) ?? 0;
    const bucket = byRow.get(row);
    if (bucket) bucket.push(element);
    else byRow.set(row, [element]);
  }

  const columns = new Map<string, number>();
  for (const row of [...byRow.keys()].sort((a, b) => a - b)) {
    const bucket = byRow.get(row)!;
    const keyed = bucket.map((element) => {
      const placed = (anchors.get(element.id) ?? [])
        .map((anchor) => columns.get(anchor))
        .filter((col): col is number => col !== undefined);
      const barycenter =
        placed.length > 0
          ? placed.reduce((sum, col) => sum + col, 0) / placed.length
          : Number.POSITIVE_INFINITY;
      // Goals lead their row; everything else follows its anchors.
      const goalFirst = element.kind === "Goal" ? 0 : 1;
      return { element, key: [goalFirst, barycenter] as const };
    });
    keyed.sort((a, b) => {
      if (a.key[0] !== b.key[0]) return a.key[0] - b.key[0];
      if (a.key[1] !== b.key[1]) return a.key[1] - b.key[1];
      return compare(a.element.id, b.element.id);
    });
    keyed.forEach((entry, index) => columns.set(entry.element.id, index));
  }
  return columns;
}

function compare(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}
