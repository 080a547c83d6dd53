/**
 * Session view state and its pure transitions.
 *
 * The viewer tier is fixed when the session starts and no transition can
 * change it; goal and stage filters mirror the server's TierFilter semantics
 * exactly (the server applies them — the client never widens visibility on
 * its own). All transitions return a fresh state object.
 */

import type { AudienceTier } from "./types.js";
import type { ViewFilter } from "./api.js";

export interface ViewState {
  /** Case being reviewed. */
  readonly caseId: string;
  /** Session tier; fixed for the lifetime of the session. */
  readonly viewerTier: AudienceTier;
  /** Goal ids to focus on; empty means no goal restriction. */
  readonly goalFilter: readonly string[];
  /** Lifecycle stage tokens to focus on; empty means no stage restriction. */
  readonly stageFilter: readonly string[];
  /** Selected element or link id, if any. */
  readonly selectedElement: string | null;
  /** Draft text of the challenge being composed. */
  readonly pendingChallenge: string;
}

export function initialState(caseId: string, viewerTier: AudienceTier): ViewState {
  return {
    caseId,
    viewerTier,
    goalFilter: [],
    stageFilter: [],
    selectedElement: null,
    pendingChallenge: "",
  };
}

export function selectElement(state: ViewState, id: string | null): ViewState {
  if (id === state.selectedElement) return state;
  // Switching focus abandons any half-written challenge draft.
  return { ...state, selectedElement: id, pendingChallenge: "" };
}

export function setGoalFilter(state: ViewState, goals: readonly string[]): ViewState {
  return { ...state, goalFilter: normalize(goals) };
}

export function setStageFilter(state: ViewState, stages: readonly string[]): ViewState {
  return { ...state, stageFilter: normalize(stages) };
}

export function editChallenge(state: ViewState, text: string): ViewState {
  return { ...state, pendingChallenge: text };
}

export function clearChallenge(state: ViewState): ViewState {
  return { ...state, pendingChallenge: "" };
}

/**
 * The narrowing filter this state asks the server to apply. Tier is never
 * part of it: the session tier travels as a header, and omitting it here is
 * what guarantees the client can never widen visibility via the query string.
 */
export function activeFilter(state: ViewState): ViewFilter {
  const filter: { goals?: string[]; stages?: string[] } = {};
  if (state.goalFilter.length > 0) filter.goals = [...state.goalFilter];
  if (state.stageFilter.length > 0) filter.stages = [...state.stageFilter];
  return filter;
}

/** Parse a comma-separated filter box value into a clean selection list. */
export function parseSelection(text: string): string[] {
  return normalize(text.split(","));
}

function normalize(values: readonly string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const value of values) {
    const token = value.trim();
    if (token && !seen.has(token)) {
      seen.add(token);
      out.push(token);
    }
  }
  return out;
}
