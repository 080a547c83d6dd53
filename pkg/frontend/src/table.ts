/**
 * Claim table and the detail pane for the selected element or link.
 *
 * The table lists every element visible at the session tier with its status;
 * the detail pane shows the server-reported fields verbatim, the challenges
 * aimed at the selection, a resolve control per open challenge, and the form
 * for filing a new challenge.
 */

import { statusFill, statusStroke } from "./colors.js";
import type {
  CaseDocument,
  ChallengePayload,
  ElementPayload,
  LinkPayload,
  StatusLabel,
} from "./types.js";

export interface TableCallbacks {
  onSelect?: (id: string) => void;
}

export interface DetailCallbacks {
  onDraftChange?: (text: string) => void;
  onSubmitChallenge?: (target: string, text: string) => void;
  onResolveChallenge?: (
    challengeId: string,
    outcome: "withdrawn" | "resolved" | "sustained",
    note: string,
  ) => void;
}

export function renderClaimTable(
  container: HTMLElement,
  doc: CaseDocument,
  statuses: Record<string, StatusLabel>,
  selectedId: string | null,
  callbacks: TableCallbacks = {},
): void {
  const dom = container.ownerDocument;
  const table = dom.createElement("table");
  table.className = "claim-table";

  const head = dom.createElement("thead");
  const headRow = dom.createElement("tr");
  for (const column of ["Id", "Kind", "Stage", "Status", "Text"]) {
    const th = dom.createElement("th");
    th.textContent = column;
    headRow.appendChild(th);
  }
  head.appendChild(headRow);
  table.appendChild(head);

  const body = dom.createElement("tbody");
  const elements = [...doc.elements].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  for (const element of elements) {
    const row = dom.createElement("tr");
    row.setAttribute("data-element-id", element.id);
    if (element.id === selectedId) row.className = "selected";

    const idCell = dom.createElement("td");
    idCell.className = "cell-id";
    idCell.textContent = element.id;
    row.appendChild(idCell);

    const kindCell = dom.createElement("td");
    kindCell.textContent = element.kind;
    row.appendChild(kindCell);

    const stageCell = dom.createElement("td");
    stageCell.textContent = element.stage ?? "—";
    row.appendChild(stageCell);

    const statusCell = dom.createElement("td");
    const status = statuses[element.id];
    if (status) {
      const chip = dom.createElement("span");
      chip.className = "status-chip";
      chip.setAttribute("data-status", status);
      chip.textContent = status;
      chip.style.backgroundColor = statusFill(status);
      chip.style.borderColor = statusStroke(status);
      statusCell.appendChild(chip);
    } else {
      statusCell.textContent = "—";
    }
    row.appendChild(statusCell);

    const textCell = dom.createElement("td");
    textCell.className = "cell-text";
    textCell.textContent = element.text;
    row.appendChild(textCell);

    row.addEventListener("click", () => callbacks.onSelect?.(element.id));
    body.appendChild(row);
  }
  table.appendChild(body);
  container.replaceChildren(table);
}

export interface DetailModel {
  doc: CaseDocument;
  statuses: Record<string, StatusLabel>;
  selectedId: string | null;
  draft: string;
  /** Inline problem from the last challenge or resolve attempt, if any. */
  formError: string | null;
}

export function renderDetailPane(
  container: HTMLElement,
  model: DetailModel,
  callbacks: DetailCallbacks = {},
): void {
  const dom = container.ownerDocument;
  const pane = dom.createElement("div");
  pane.className = "detail-pane";

  if (!model.selectedId) {
    const hint = dom.createElement("p");
    hint.className = "detail-hint";
    hint.textContent = "Select an element or link to inspect it and file challenges.";
    pane.appendChild(hint);
    container.replaceChildren(pane);
    return;
  }

  const element = model.doc.elements.find((e) => e.id === model.selectedId);
  const link = model.doc.links.find((l) => l.id === model.selectedId);
  if (element) {
    pane.appendChild(elementDetails(dom, element, model.statuses[element.id]));
  } else if (link) {
    pane.appendChild(linkDetails(dom, link));
  } else {
    const gone = dom.createElement("p");
    gone.className = "detail-hint";
    gone.textContent = `${model.selectedId} is not visible in this view.`;
    pane.appendChild(gone);
    container.replaceChildren(pane);
    return;
  }

  const challenges = model.doc.challenges.filter((c) => c.target === model.selectedId);
  pane.appendChild(challengeList(dom, challenges, callbacks));
  pane.appendChild(challengeForm(dom, model, callbacks));
  container.replaceChildren(pane);
}

function elementDetails(
  dom: Document,
  element: ElementPayload,
  status: StatusLabel | undefined,
): HTMLElement {
  const section = dom.createElement("section");
  section.className = "detail-fields";

  const heading = dom.createElement("h3");
  heading.textContent = `${element.id} · ${element.kind}`;
  section.appendChild(heading);

  if (status) {
    const chip = dom.createElement("span");
    chip.className = "status-chip detail-status";
    chip.setAttribute("data-status", status);
    chip.textContent = status;
    chip.style.backgroundColor = statusFill(status);
    chip.style.borderColor = statusStroke(status);
    section.appendChild(chip);
  }

  const text = dom.createElement("p");
  text.className = "detail-text";
  text.textContent = element.text;
  section.appendChild(text);

  const facts = dom.createElement("dl");
  const fact = (label: string, value: string | undefined) => {
    if (value === undefined) return;
    const dt = dom.createElement("dt");
    dt.textContent = label;
    const dd = dom.createElement("dd");
    dd.textContent = value;
    facts.appendChild(dt);
    facts.appendChild(dd);
  };
  fact("Scope", element.scope);
  fact("Stage", element.stage);
  fact("Tier", element.tier);
  fact("Locator", element.locator);
  if (element.slots) {
    for (const [name, value] of Object.entries(element.slots)) {
      fact(`Slot ${name}`, value);
    }
  }
  if (facts.childNodes.length > 0) section.appendChild(facts);
  return section;
}

function linkDetails(dom: Document, link: LinkPayload): HTMLElement {
  const section = dom.createElement("section");
  section.className = "detail-fields";

  const heading = dom.createElement("h3");
  heading.textContent = `${link.id} · ${link.kind} link`;
  section.appendChild(heading);

  const text = dom.createElement("p");
  text.className = "detail-text";
  text.textContent = `${link.from} ${link.kind} ${link.to}`;
  section.appendChild(text);

  if (link.qualifier) {
    const qualifier = dom.createElement("p");
    qualifier.className = "detail-qualifier";
    qualifier.textContent = `Qualifier: ${link.qualifier.label}`;
    section.appendChild(qualifier);
  }
  return section;
}

function challengeList(
  dom: Document,
  challenges: ChallengePayload[],
  callbacks: DetailCallbacks,
): HTMLElement {
  const section = dom.createElement("section");
  section.className = "challenge-list";

  const heading = dom.createElement("h4");
  heading.textContent = challenges.length > 0 ? "Challenges" : "No challenges yet";
  section.appendChild(heading);

  for (const challenge of challenges) {
    const item = dom.createElement("div");
    item.className = `challenge challenge-${challenge.state}`;
    item.setAttribute("data-challenge-id", challenge.id);

    const header = dom.createElement("div");
    header.className = "challenge-header";
    header.textContent = `${challenge.id} · ${challenge.state} · by ${challenge.author}`;
    item.appendChild(header);

    const body = dom.createElement("p");
    body.className = "challenge-text";
    body.textContent = challenge.text;
    item.appendChild(body);

    if (challenge.resolutionNote) {
      const note = dom.createElement("p");
      note.className = "challenge-note";
      note.textContent = `Note: ${challenge.resolutionNote}`;
      item.appendChild(note);
    }

    if (challenge.state === "open") {
      item.appendChild(resolveControls(dom, challenge.id, callbacks));
    }
    section.appendChild(item);
  }
  return section;
}

function resolveControls(
  dom: Document,
  challengeId: string,
  callbacks: DetailCallbacks,
): HTMLElement {
  const row = dom.createElement("div");
  row.className = "resolve-controls";

  const outcome = dom.createElement("select");
  outcome.className = "resolve-outcome";
  for (const value of ["resolved", "withdrawn", "sustained"]) {
    const option = dom.createElement("option");
    option.value = value;
    option.textContent = value;
    outcome.appendChild(option);
  }
  row.appendChild(outcome);

  const note = dom.createElement("input");
  note.className = "resolve-note";
  note.setAttribute("type", "text");
  note.setAttribute("placeholder", "resolution note");
  row.appendChild(note);

  const button = dom.createElement("button");
  button.className = "resolve-button";
  button.setAttribute("type", "button");
  button.textContent = "Resolve";
  button.addEventListener("click", () => {
    callbacks.onResolveChallenge?.(
      challengeId,
      outcome.value as "withdrawn" | "resolved" | "sustained",
      note.value,
    );
  });
  row.appendChild(button);
  return row;
}

function challengeForm(
  dom: Document,
  model: DetailModel,
  callbacks: DetailCallbacks,
): HTMLElement {
  const form = dom.createElement("section");
  form.className = "challenge-form";

  const heading = dom.createElement("h4");
  heading.textContent = `Challenge ${model.selectedId}`;
  form.appendChild(heading);

  const textarea = dom.createElement("textarea");
  textarea.className = "challenge-input";
  textarea.setAttribute("placeholder", "Why should this be doubted?");
  textarea.value = model.draft;
  textarea.addEventListener("input", () => callbacks.onDraftChange?.(textarea.value));
  form.appendChild(textarea);

  const button = dom.createElement("button");
  button.className = "challenge-submit";
  button.setAttribute("type", "button");
  button.textContent = "File challenge";
  button.addEventListener("click", () => {
    callbacks.onSubmitChallenge?.(model.selectedId!, textarea.value);
  });
  form.appendChild(button);

  const error = dom.createElement("p");
  error.className = "form-error";
  if (model.formError) {
    error.textContent = model.formError;
  } else {
    error.style.display = "none";
  }
  form.appendChild(error);
  return form;
}
