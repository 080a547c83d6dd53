/**
 * Phase-compare panel: pick two snapshots, fetch the server diff, and show
 * the change list side by side — phase bumps as a banner, additions and
 * removals per section, and status deltas with before/after colors.
 */

import { statusFill, statusStroke } from "./colors.js";
import type { DiffReport, SnapshotInfo, StatusLabel } from "./types.js";

export interface DiffModel {
  snapshots: SnapshotInfo[];
  from: string | null;
  to: string | null;
  report: DiffReport | null;
  /** Problem text when the last compare failed (e.g. unknown snapshot). */
  error: string | null;
}

export interface DiffCallbacks {
  onCompare?: (from: string, to: string) => void;
}

export function renderDiffPanel(
  container: HTMLElement,
  model: DiffModel,
  callbacks: DiffCallbacks = {},
): void {
  const dom = container.ownerDocument;
  const panel = dom.createElement("section");
  panel.className = "diff-panel";

  const heading = dom.createElement("h3");
  heading.textContent = "Compare snapshots";
  panel.appendChild(heading);

  if (model.snapshots.length === 0) {
    const hint = dom.createElement("p");
    hint.className = "diff-hint";
    hint.textContent = "No snapshots recorded for this case.";
    panel.appendChild(hint);
    container.replaceChildren(panel);
    return;
  }

  const controls = dom.createElement("div");
  controls.className = "diff-controls";
  const fromSelect = snapshotSelect(dom, "diff-from", model.snapshots, model.from);
  const toSelect = snapshotSelect(dom, "diff-to", model.snapshots, model.to);
  controls.appendChild(fromSelect);
  const arrow = dom.createElement("span");
  arrow.textContent = "→";
  controls.appendChild(arrow);
  controls.appendChild(toSelect);

  const button = dom.createElement("button");
  button.className = "diff-compare";
  button.setAttribute("type", "button");
  button.textContent = "Compare";
  button.addEventListener("click", () => {
    callbacks.onCompare?.(fromSelect.value, toSelect.value);
  });
  controls.appendChild(button);
  panel.appendChild(controls);

  const result = dom.createElement("div");
  result.className = "diff-result";
  if (model.error) {
    const error = dom.createElement("p");
    error.className = "diff-empty-state";
    error.textContent = model.error;
    result.appendChild(error);
  } else if (model.report) {
    renderReport(dom, result, model.report);
  }
  panel.appendChild(result);
  container.replaceChildren(panel);
}

function snapshotSelect(
  dom: Document,
  className: string,
  snapshots: SnapshotInfo[],
  selected: string | null,
): HTMLSelectElement {
  const select = dom.createElement("select");
  select.className = className;
  for (const snapshot of snapshots) {
    const option = dom.createElement("option");
    option.value = snapshot.label;
    option.textContent = `${snapshot.label} (${snapshot.takenAt})`;
    if (snapshot.label === selected) option.setAttribute("selected", "selected");
    select.appendChild(option);
  }
  return select;
}

function renderReport(dom: Document, container: HTMLElement, report: DiffReport): void {
  if (report.empty) {
    const none = dom.createElement("p");
    none.className = "diff-no-changes";
    none.textContent = "no changes";
    container.appendChild(none);
    return;
  }

  if (report.phaseChange) {
    const banner = dom.createElement("div");
    banner.className = "banner phase-banner";
    banner.textContent = `Phase changed: ${report.phaseChange[0]} → ${report.phaseChange[1]}`;
    container.appendChild(banner);
  }
  if (report.titleChange) {
    container.appendChild(
      diffRow(dom, "modified", "title", `"${report.titleChange[0]}" → "${report.titleChange[1]}"`),
    );
  }

  const sections: Array<[string, DiffReport["elements"]]> = [
    ["element", report.elements],
    ["link", report.links],
    ["challenge", report.challenges],
  ];
  for (const [noun, section] of sections) {
    for (const id of section.added) {
      container.appendChild(diffRow(dom, "added", noun, `${noun} ${id} added`, id));
    }
    for (const id of section.removed) {
      container.appendChild(diffRow(dom, "removed", noun, `${noun} ${id} removed`, id));
    }
    for (const entry of section.modified) {
      const fields = entry.fields.map((f) => f.field).join(", ");
      container.appendChild(
        diffRow(dom, "modified", noun, `${noun} ${entry.id} modified (${fields})`, entry.id),
      );
    }
  }

  for (const [id, delta] of Object.entries(report.statusDeltas).sort()) {
    const row = dom.createElement("div");
    row.className = "diff-row status-delta";
    row.setAttribute("data-delta-id", id);

    const label = dom.createElement("span");
    label.className = "delta-id";
    label.textContent = `status ${id}: `;
    row.appendChild(label);
    row.appendChild(statusChip(dom, delta.before));
    const arrow = dom.createElement("span");
    arrow.textContent = " → ";
    row.appendChild(arrow);
    row.appendChild(statusChip(dom, delta.after));
    container.appendChild(row);
  }

  for (const finding of report.findings.added) {
    container.appendChild(diffRow(dom, "added", "finding", `finding appeared: ${finding}`));
  }
  for (const finding of report.findings.removed) {
    container.appendChild(diffRow(dom, "removed", "finding", `finding cleared: ${finding}`));
  }
}

function diffRow(
  dom: Document,
  change: "added" | "removed" | "modified",
  noun: string,
  text: string,
  id?: string,
): HTMLElement {
  const row = dom.createElement("div");
  row.className = `diff-row diff-${change} diff-${noun}`;
  row.setAttribute("data-change", change);
  if (id) row.setAttribute("data-subject", id);
  row.textContent = text;
  return row;
}

function statusChip(dom: Document, status: StatusLabel): HTMLElement {
  const chip = dom.createElement("span");
  chip.className = "status-chip";
  chip.setAttribute("data-status", status);
  chip.textContent = status;
  chip.style.backgroundColor = statusFill(status);
  chip.style.borderColor = statusStroke(status);
  return chip;
}
