/**
 * Review client application.
 *
 * mount() builds the whole UI inside a host element — header with redaction
 * badge, goal/stage filter bar, case graph, detail pane with the challenge
 * workflow, claim table, and the snapshot compare panel — and keeps it in
 * sync with the review service. The session tier is fixed at mount time and
 * every request carries it; the server decides what is visible.
 *
 * All DOM nodes are created through the host element's ownerDocument, so the
 * app runs unchanged in a browser or in a synthetic DOM.
 */

import { ApiError, ReviewApi } from "./api.js";
import { renderDiffPanel, type DiffModel } from "./diff.js";
import { recolorGraph, renderGraph } from "./graph.js";
import { layoutCase } from "./layout.js";
import { startDigestPoll } from "./poll.js";
import {
  activeFilter,
  editChallenge,
  initialState,
  parseSelection,
  selectElement,
  setGoalFilter,
  setStageFilter,
  type ViewState,
} from "./state.js";
import { renderClaimTable, renderDetailPane } from "./table.js";
import type { AudienceTier, CaseDocument, StatusReport } from "./types.js";

export interface MountOptions {
  /** Service origin, e.g. "http://127.0.0.1:8321"; empty string = same origin. */
  baseUrl: string;
  /** Session tier; fixed for the lifetime of this mount. */
  tier: AudienceTier;
  /** Case to open; defaults to the first case the service lists. */
  caseId?: string;
  /** Author recorded on filed challenges; editable in the header. */
  reviewer?: string;
  /** Digest poll interval in milliseconds. */
  pollIntervalMs?: number;
  /** Fetch implementation; defaults to the global fetch. */
  fetchImpl?: typeof fetch;
}

export interface AppHandle {
  /** Re-fetch everything and re-render. */
  refresh: () => Promise<void>;
  /** Stop polling and detach the app from the service. */
  stop: () => void;
  /** Current view state (read-only snapshot). */
  state: () => ViewState;
}

const DEFAULT_POLL_MS = 5000;

export async function mount(root: HTMLElement, options: MountOptions): Promise<AppHandle> {
  const doc = root.ownerDocument;
  const api = new ReviewApi({
    baseUrl: options.baseUrl,
    tier: options.tier,
    fetchImpl: options.fetchImpl,
  });

  // --- static skeleton -----------------------------------------------------

  const app = doc.createElement("div");
  app.className = "eac-app";

  const header = doc.createElement("header");
  header.className = "app-header";
  const title = doc.createElement("h1");
  title.className = "case-title";
  title.textContent = "Assurance case review";
  header.appendChild(title);

  const tierChip = doc.createElement("span");
  tierChip.className = "tier-chip";
  tierChip.setAttribute("data-tier", options.tier);
  tierChip.textContent = `${options.tier} tier`;
  header.appendChild(tierChip);

  const phaseChip = doc.createElement("span");
  phaseChip.className = "phase-chip";
  header.appendChild(phaseChip);

  const redactionBadge = doc.createElement("span");
  redactionBadge.className = "redaction-badge";
  redactionBadge.setAttribute("data-count", "0");
  redactionBadge.textContent = "0 withheld";
  header.appendChild(redactionBadge);

  const reviewerLabel = doc.createElement("label");
  reviewerLabel.className = "reviewer-label";
  reviewerLabel.textContent = "Reviewing as ";
  const reviewerInput = doc.createElement("input");
  reviewerInput.className = "reviewer-name";
  reviewerInput.setAttribute("type", "text");
  reviewerInput.value = options.reviewer ?? "reviewer";
  reviewerLabel.appendChild(reviewerInput);
  header.appendChild(reviewerLabel);
  app.appendChild(header);

  const unreachableBanner = doc.createElement("div");
  unreachableBanner.className = "banner banner-unreachable";
  unreachableBanner.style.display = "none";
  const unreachableText = doc.createElement("span");
  unreachableText.textContent = "Review service unreachable.";
  unreachableBanner.appendChild(unreachableText);
  const retryButton = doc.createElement("button");
  retryButton.className = "banner-retry";
  retryButton.setAttribute("type", "button");
  retryButton.textContent = "Retry";
  unreachableBanner.appendChild(retryButton);
  app.appendChild(unreachableBanner);

  const staleBanner = doc.createElement("div");
  staleBanner.className = "banner banner-stale";
  staleBanner.style.display = "none";
  const staleText = doc.createElement("span");
  staleText.textContent = "This case changed on the server. The view is stale.";
  staleBanner.appendChild(staleText);
  const refreshButton = doc.createElement("button");
  refreshButton.className = "banner-refresh";
  refreshButton.setAttribute("type", "button");
  refreshButton.textContent = "Refresh";
  staleBanner.appendChild(refreshButton);
  app.appendChild(staleBanner);

  const filterBar = doc.createElement("div");
  filterBar.className = "filter-bar";
  const goalLabel = doc.createElement("label");
  goalLabel.textContent = "Goals ";
  const goalInput = doc.createElement("input");
  goalInput.className = "goal-filter";
  goalInput.setAttribute("type", "text");
  goalInput.setAttribute("placeholder", "all goals");
  goalLabel.appendChild(goalInput);
  filterBar.appendChild(goalLabel);

  const stageLabel = doc.createElement("label");
  stageLabel.textContent = " Stages ";
  const stageInput = doc.createElement("input");
  stageInput.className = "stage-filter";
  stageInput.setAttribute("type", "text");
  stageInput.setAttribute("placeholder", "all lifecycle stages");
  stageLabel.appendChild(stageInput);
  filterBar.appendChild(stageLabel);

  const applyButton = doc.createElement("button");
  applyButton.className = "apply-filters";
  applyButton.setAttribute("type", "button");
  applyButton.textContent = "Apply filters";
  filterBar.appendChild(applyButton);

  const filterError = doc.createElement("span");
  filterError.className = "filter-error";
  filterError.style.display = "none";
  filterBar.appendChild(filterError);
  app.appendChild(filterBar);

  const main = doc.createElement("main");
  main.className = "app-main";
  const graphPane = doc.createElement("div");
  graphPane.className = "graph-pane";
  main.appendChild(graphPane);
  const sidePane = doc.createElement("aside");
  sidePane.className = "side-pane";
  main.appendChild(sidePane);
  app.appendChild(main);

  const tablePane = doc.createElement("section");
  tablePane.className = "table-pane";
  app.appendChild(tablePane);

  const comparePane = doc.createElement("section");
  comparePane.className = "compare-pane";
  app.appendChild(comparePane);

  root.replaceChildren(app);

  // --- mutable session state ----------------------------------------------

  let view: ViewState = initialState(options.caseId ?? "", options.tier);
  let caseDoc: CaseDocument | null = null;
  let status: StatusReport | null = null;
  let graphSvg: SVGSVGElement | null = null;
  let formError: string | null = null;
  const diffModel: DiffModel = {
    snapshots: [],
    from: null,
    to: null,
    report: null,
    error: null,
  };

  const showUnreachable = (show: boolean) => {
    unreachableBanner.style.display = show ? "" : "none";
  };
  const showStale = (show: boolean) => {
    staleBanner.style.display = show ? "" : "none";
  };

  // --- rendering -----------------------------------------------------------

  const renderHeader = () => {
    if (!caseDoc) return;
    title.textContent = caseDoc.case.title;
    phaseChip.textContent = `phase: ${caseDoc.case.phase}`;
    redactionBadge.setAttribute("data-count", String(caseDoc.redactions));
    redactionBadge.textContent = `${caseDoc.redactions} withheld`;
  };

  const renderGraphPane = () => {
    if (!caseDoc || !status) return;
    graphSvg = renderGraph(
      graphPane,
      layoutCase(caseDoc),
      status.statuses,
      view.selectedElement,
      { onSelect: handleSelect },
    );
  };

  const renderTablePane = () => {
    if (!caseDoc || !status) return;
    renderClaimTable(tablePane, caseDoc, status.statuses, view.selectedElement, {
      onSelect: handleSelect,
    });
  };

  const renderSidePane = () => {
    if (!caseDoc || !status) return;
    renderDetailPane(
      sidePane,
      {
        doc: caseDoc,
        statuses: status.statuses,
        selectedId: view.selectedElement,
        draft: view.pendingChallenge,
        formError,
      },
      {
        onDraftChange: (text) => {
          view = editChallenge(view, text);
        },
        onSubmitChallenge: handleSubmitChallenge,
        onResolveChallenge: handleResolveChallenge,
      },
    );
  };

  const renderComparePane = () => {
    renderDiffPanel(comparePane, diffModel, { onCompare: handleCompare });
  };

  const renderAll = () => {
    renderHeader();
    renderGraphPane();
    renderSidePane();
    renderTablePane();
    renderComparePane();
  };

  // --- data flows ----------------------------------------------------------

  const loadCase = async () => {
    if (!view.caseId) {
      const cases = await api.listCases();
      if (cases.length === 0) throw new ApiError(404, "no-cases", "the service lists no cases");
      view = { ...view, caseId: cases[0].id };
    }
    const filter = activeFilter(view);
    const [docPayload, statusPayload] = await Promise.all([
      api.getCase(view.caseId, filter),
      api.getStatus(view.caseId, filter),
    ]);
    caseDoc = docPayload;
    status = statusPayload;
    showUnreachable(false);
  };

  const loadSnapshots = async () => {
    diffModel.snapshots = await api.listSnapshots(view.caseId);
  };

  /** After an accepted mutation: fresh status + document, recolor in place. */
  const refreshAfterMutation = async () => {
    const filter = activeFilter(view);
    const [docPayload, statusPayload] = await Promise.all([
      api.getCase(view.caseId, filter),
      api.getStatus(view.caseId, filter),
    ]);
    caseDoc = docPayload;
    status = statusPayload;
    showStale(false);
    if (graphSvg) {
      recolorGraph(graphSvg, status.statuses);
    } else {
      renderGraphPane();
    }
    renderHeader();
    renderSidePane();
    renderTablePane();
  };

  const fullRefresh = async () => {
    try {
      await loadCase();
      await loadSnapshots();
      showStale(false);
      renderAll();
    } catch (error) {
      if (error instanceof ApiError) {
        filterError.textContent = `${error.code}: ${error.message}`;
        filterError.style.display = "";
      } else {
        showUnreachable(true);
      }
    }
  };

  // --- event handlers --------------------------------------------------------

  function handleSelect(id: string | null): void {
    view = selectElement(view, id);
    formError = null;
    renderGraphPane();
    renderSidePane();
    renderTablePane();
  }

  async function handleSubmitChallenge(target: string, text: string): Promise<void> {
    view = editChallenge(view, text);
    if (!text.trim()) {
      formError = "Challenge text is required.";
      renderSidePane();
      return;
    }
    try {
      await api.submitChallenge(view.caseId, {
        target,
        author: reviewerInput.value,
        text,
      });
      formError = null;
      view = editChallenge(view, "");
      await refreshAfterMutation();
    } catch (error) {
      if (error instanceof ApiError) {
        formError = `${error.code}: ${error.message}`;
        renderSidePane();
      } else {
        showUnreachable(true);
      }
    }
  }

  async function handleResolveChallenge(
    challengeId: string,
    outcome: "withdrawn" | "resolved" | "sustained",
    note: string,
  ): Promise<void> {
    try {
      await api.resolveChallenge(
        view.caseId,
        challengeId,
        outcome,
        note.trim() ? note : undefined,
      );
      formError = null;
      await refreshAfterMutation();
    } catch (error) {
      if (error instanceof ApiError) {
        formError = `${error.code}: ${error.message}`;
        renderSidePane();
      } else {
        showUnreachable(true);
      }
    }
  }

  async function handleCompare(from: string, to: string): Promise<void> {
    diffModel.from = from;
    diffModel.to = to;
    try {
      diffModel.report = await api.getDiff(view.caseId, from, to);
      diffModel.error = null;
    } catch (error) {
      diffModel.report = null;
      diffModel.error =
        error instanceof ApiError ? error.message : "Review service unreachable.";
      if (!(error instanceof ApiError)) showUnreachable(true);
    }
    renderComparePane();
  }

  const applyFilters = async () => {
    view = setGoalFilter(view, parseSelection(goalInput.value));
    view = setStageFilter(view, parseSelection(stageInput.value));
    filterError.style.display = "none";
    try {
      await loadCase();
      renderAll();
    } catch (error) {
      if (error instanceof ApiError) {
        filterError.textContent = `${error.code}: ${error.message}`;
        filterError.style.display = "";
      } else {
        showUnreachable(true);
      }
    }
  };

  applyButton.addEventListener("click", () => {
    void applyFilters();
  });
  retryButton.addEventListener("click", () => {
    void fullRefresh();
  });
  refreshButton.addEventListener("click", () => {
    void fullRefresh();
  });

  // --- boot ------------------------------------------------------------------

  try {
    await loadCase();
    await loadSnapshots();
    renderAll();
  } catch (error) {
    if (error instanceof ApiError) {
      filterError.textContent = `${error.code}: ${error.message}`;
      filterError.style.display = "";
    } else {
      showUnreachable(true);
    }
  }

  const stopPoll = startDigestPoll({
    api,
    caseId: view.caseId || options.caseId || "",
    intervalMs: options.pollIntervalMs ?? DEFAULT_POLL_MS,
    knownDigest: () => status?.digest ?? null,
    onStale: () => showStale(true),
    onError: (error) => {
      if (!(error instanceof ApiError)) showUnreachable(true);
    },
    onHealthy: () => showUnreachable(false),
  });

  return {
    refresh: fullRefresh,
    stop: stopPoll,
    state: () => view,
  };
}
