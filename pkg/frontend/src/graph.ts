/**
 * SVG rendering of the case graph.
 *
 * Nodes carry data-element-id and data-status attributes and are filled from
 * the status palette, so a status refresh can recolor the picture in place
 * without rebuilding it. Links are clickable too: argument links draw solid
 * with an arrowhead (and their qualifier, when present), context links draw
 * dashed, and warrant links draw dotted from the warrant to the midpoint of
 * the link they warrant.
 */

import { statusFill, statusStroke } from "./colors.js";
import type { GraphLayout, LayoutNode } from "./layout.js";
import type { StatusLabel } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GraphCallbacks {
  onSelect?: (id: string | null) => void;
}

interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export function renderGraph(
  container: HTMLElement,
  layout: GraphLayout,
  statuses: Record<string, StatusLabel>,
  selectedId: string | null,
  callbacks: GraphCallbacks = {},
): SVGSVGElement {
  const doc = container.ownerDocument;
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("class", "case-graph");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));
  svg.setAttribute("role", "img");

  svg.appendChild(makeDefs(doc));

  const edgeGroup = doc.createElementNS(SVG_NS, "g");
  edgeGroup.setAttribute("class", "edges");
  const nodeGroup = doc.createElementNS(SVG_NS, "g");
  nodeGroup.setAttribute("class", "nodes");
  svg.appendChild(edgeGroup);
  svg.appendChild(nodeGroup);

  // Argument and context segments first; warrant edges aim at their midpoints.
  const segments = new Map<string, Segment>();
  for (const link of layout.links) {
    if (link.kind === "warrants") continue;
    const from = layout.nodesById.get(link.from);
    const to = layout.nodesById.get(link.to);
    if (!from || !to) continue;
    const segment = connect(from, to);
    segments.set(link.id, segment);
    edgeGroup.appendChild(
      makeEdge(doc, link.id, link.kind, segment, link.qualifier?.label, selectedId),
    );
  }
  for (const link of layout.links) {
    if (link.kind !== "warrants") continue;
    const from = layout.nodesById.get(link.from);
    const anchor = segments.get(link.to);
    if (!from || !anchor) continue;
    const segment: Segment = {
      x1: from.x + from.width / 2,
      y1: from.y + from.height / 2,
      x2: (anchor.x1 + anchor.x2) / 2,
      y2: (anchor.y1 + anchor.y2) / 2,
    };
    edgeGroup.appendChild(makeEdge(doc, link.id, link.kind, segment, undefined, selectedId));
  }

  for (const node of layout.nodes) {
    nodeGroup.appendChild(makeNode(doc, node, statuses[node.id] ?? null, selectedId));
  }

  svg.addEventListener("click", (event) => {
    const target = event.target as Element | null;
    const hit = target?.closest?.("[data-element-id], [data-link-id]") ?? null;
    if (!hit) {
      callbacks.onSelect?.(null);
      return;
    }
    callbacks.onSelect?.(
      hit.getAttribute("data-element-id") ?? hit.getAttribute("data-link-id"),
    );
  });

  container.replaceChildren(svg);
  return svg;
}

/** Re-apply status colors to an already rendered graph, in place. */
export function recolorGraph(
  svg: SVGSVGElement,
  statuses: Record<string, StatusLabel>,
): void {
  for (const group of svg.querySelectorAll("g[data-element-id]")) {
    const id = group.getAttribute("data-element-id");
    if (!id) continue;
    const status = statuses[id];
    if (!status) continue;
    group.setAttribute("data-status", status);
    const rect = group.querySelector("rect.node-box");
    if (rect) {
      rect.setAttribute("fill", statusFill(status));
      rect.setAttribute("stroke", statusStroke(status));
    }
  }
}

function makeDefs(doc: Document): SVGElement {
  const defs = doc.createElementNS(SVG_NS, "defs");
  const marker = doc.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 10 10");
  marker.setAttribute("refX", "9");
  marker.setAttribute("refY", "5");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = doc.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
  tip.setAttribute("fill", "#555555");
  marker.appendChild(tip);
  defs.appendChild(marker);
  return defs as SVGElement;
}

/** Segment from the supporting node's top edge to the supported node's bottom edge. */
function connect(from: LayoutNode, to: LayoutNode): Segment {
  if (from.row === to.row) {
    // Same-row pair (e.g. goal arguing for goal): connect the facing sides.
    const leftFirst = from.x <= to.x;
    return {
      x1: leftFirst ? from.x + from.width : from.x,
      y1: from.y + from.height / 2,
      x2: leftFirst ? to.x : to.x + to.width,
      y2: to.y + to.height / 2,
    };
  }
  const downward = from.row > to.row;
  return {
    x1: from.x + from.width / 2,
    y1: downward ? from.y : from.y + from.height,
    x2: to.x + to.width / 2,
    y2: downward ? to.y + to.height : to.y,
  };
}

function makeEdge(
  doc: Document,
  linkId: string,
  kind: string,
  segment: Segment,
  qualifier: string | undefined,
  selectedId: string | null,
): SVGElement {
  const group = doc.createElementNS(SVG_NS, "g");
  group.setAttribute("data-link-id", linkId);
  group.setAttribute("data-link-kind", kind);
  group.setAttribute("class", `edge edge-${kind}${selectedId === linkId ? " selected" : ""}`);

  // Wide transparent twin of the visible line so thin edges stay clickable.
  const hit = doc.createElementNS(SVG_NS, "line");
  hit.setAttribute("x1", fmt(segment.x1));
  hit.setAttribute("y1", fmt(segment.y1));
  hit.setAttribute("x2", fmt(segment.x2));
  hit.setAttribute("y2", fmt(segment.y2));
  hit.setAttribute("stroke", "transparent");
  hit.setAttribute("stroke-width", "12");
  group.appendChild(hit);

  const line = doc.createElementNS(SVG_NS, "line");
  line.setAttribute("x1", fmt(segment.x1));
  line.setAttribute("y1", fmt(segment.y1));
  line.setAttribute("x2", fmt(segment.x2));
  line.setAttribute("y2", fmt(segment.y2));
  line.setAttribute("stroke", selectedId === linkId ? "#1a73e8" : "#555555");
  line.setAttribute("stroke-width", selectedId === linkId ? "2.5" : "1.5");
  line.setAttribute("fill", "none");
  if (kind === "supports" || kind === "evidences") {
    line.setAttribute("marker-end", "url(#arrow)");
  } else if (kind === "contextOf") {
    line.setAttribute("stroke-dasharray", "7 4");
  } else if (kind === "warrants") {
    line.setAttribute("stroke-dasharray", "2 4");
  }
  group.appendChild(line);

  if (qualifier) {
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", fmt((segment.x1 + segment.x2) / 2 + 6));
    label.setAttribute("y", fmt((segment.y1 + segment.y2) / 2 - 4));
    label.setAttribute("class", "qualifier-label");
    label.setAttribute("font-size", "10");
    label.setAttribute("fill", "#666666");
    label.textContent = qualifier;
    group.appendChild(label);
  }
  return group as SVGElement;
}

function makeNode(
  doc: Document,
  node: LayoutNode,
  status: StatusLabel | null,
  selectedId: string | null,
): SVGElement {
  const group = doc.createElementNS(SVG_NS, "g");
  group.setAttribute("data-element-id", node.id);
  group.setAttribute("data-kind", node.element.kind);
  if (status) group.setAttribute("data-status", status);
  group.setAttribute(
    "class",
    `node node-${node.element.kind}${selectedId === node.id ? " selected" : ""}`,
  );

  const rect = doc.createElementNS(SVG_NS, "rect");
  rect.setAttribute("class", "node-box");
  rect.setAttribute("x", fmt(node.x));
  rect.setAttribute("y", fmt(node.y));
  rect.setAttribute("width", fmt(node.width));
  rect.setAttribute("height", fmt(node.height));
  rect.setAttribute("rx", node.element.kind === "Goal" ? "14" : "4");
  rect.setAttribute("fill", status ? statusFill(status) : "#ffffff");
  rect.setAttribute("stroke", status ? statusStroke(status) : "#888888");
  rect.setAttribute("stroke-width", selectedId === node.id ? "3" : "1.5");
  group.appendChild(rect);

  const title = doc.createElementNS(SVG_NS, "title");
  title.textContent = `${node.id} (${node.element.kind}): ${node.element.text}`;
  group.appendChild(title);

  const idLabel = doc.createElementNS(SVG_NS, "text");
  idLabel.setAttribute("x", fmt(node.x + 10));
  idLabel.setAttribute("y", fmt(node.y + 18));
  idLabel.setAttribute("class", "node-id");
  idLabel.setAttribute("font-size", "13");
  idLabel.setAttribute("font-weight", "bold");
  idLabel.textContent = node.id;
  group.appendChild(idLabel);

  const kindLabel = doc.createElementNS(SVG_NS, "text");
  kindLabel.setAttribute("x", fmt(node.x + node.width - 10));
  kindLabel.setAttribute("y", fmt(node.y + 18));
  kindLabel.setAttribute("text-anchor", "end");
  kindLabel.setAttribute("class", "node-kind");
  kindLabel.setAttribute("font-size", "10");
  kindLabel.setAttribute("fill", "#555555");
  kindLabel.textContent = node.element.kind;
  group.appendChild(kindLabel);

  const lines = wrap(node.element.text, 26, 3);
  lines.forEach((text, index) => {
    const textLabel = doc.createElementNS(SVG_NS, "text");
    textLabel.setAttribute("x", fmt(node.x + 10));
    textLabel.setAttribute("y", fmt(node.y + 34 + index * 13));
    textLabel.setAttribute("class", "node-text");
    textLabel.setAttribute("font-size", "10");
    textLabel.textContent = text;
    group.appendChild(textLabel);
  });

  return group as SVGElement;
}

function wrap(text: string, perLine: number, maxLines: number): string[] {
  const words = text.split(/\s+/).filter(Boolean);
  const lines: string[] = [];
  let current = "";
  for (const word of words) {
    const candidate = current ? `${current} ${word}` : word;
    if (candidate.length <= perLine) {
      current = candidate;
      continue;
    }
    if (current) lines.push(current);
    current = word.length > perLine ? `${word.slice(0, perLine - 1)}…` : word;
    if (lines.length === maxLines) break;
  }
  if (current && lines.length < maxLines) lines.push(current);
  if (lines.length === maxLines && words.join(" ").length > lines.join(" ").length) {
    const last = lines[maxLines - 1];
    lines[maxLines - 1] = last.endsWith("…") ? last : `${last}…`;
  }
  return lines;
}

function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}
