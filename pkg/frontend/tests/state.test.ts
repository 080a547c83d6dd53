import { describe, expect, it } from "vitest";

import {
  activeFilter,
  clearChallenge,
  editChallenge,
  initialState,
  parseSelection,
  selectElement,
  setGoalFilter,
  setStageFilter,
  type ViewState,
} from "../src/state.js";

describe("initialState", () => {
  it("starts with no filters, no selection, no draft", () => {
    const state = initialState("healthcare", "auditor");
    expect(state).toEqual({
      caseId: "healthcare",
      viewerTier: "auditor",
      goalFilter: [],
      stageFilter: [],
      selectedElement: null,
      pendingChallenge: "",
    });
  });
});

describe("transitions", () => {
  const base = initialState("healthcare", "public");

  it("selecting an element returns a new state and keeps the old one intact", () => {
    const next = selectElement(base, "G1");
    expect(next).not.toBe(base);
    expect(next.selectedElement).toBe("G1");
    expect(base.selectedElement).toBeNull();
  });

  it("re-selecting the same id is a no-op", () => {
    const once = selectElement(base, "G1");
    expect(selectElement(once, "G1")).toBe(once);
  });

  it("changing selection abandons the pending draft", () => {
    const drafting = editChallenge(selectElement(base, "G1"), "half a thought");
    const moved = selectElement(drafting, "C2");
    expect(moved.pendingChallenge).toBe("");
  });

  it("deselecting clears selection", () => {
    const next = selectElement(selectElement(base, "G1"), null);
    expect(next.selectedElement).toBeNull();
  });

  it("edits and clears the challenge draft", () => {
    const drafting = editChallenge(base, "The warrant looks outdated.");
    expect(drafting.pendingChallenge).toBe("The warrant looks outdated.");
    expect(clearChallenge(drafting).pendingChallenge).toBe("");
  });

  it("normalizes filter selections: trims, deduplicates, preserves order", () => {
    const next = setGoalFilter(base, [" G2 ", "G1", "G2", ""]);
    expect(next.goalFilter).toEqual(["G2", "G1"]);
    const staged = setStageFilter(base, ["data_analysis", " data_analysis"]);
    expect(staged.stageFilter).toEqual(["data_analysis"]);
  });

  it("never changes the viewer tier, whatever the transition", () => {
    let state: ViewState = initialState("healthcare", "public");
    state = selectElement(state, "G1");
    state = setGoalFilter(state, ["G1"]);
    state = setStageFilter(state, ["data_analysis"]);
    state = editChallenge(state, "text");
    state = clearChallenge(state);
    state = selectElement(state, null);
    expect(state.viewerTier).toBe("public");
  });
});

describe("activeFilter", () => {
  const base = initialState("healthcare", "public");

  it("is empty when no filters are set", () => {
    expect(activeFilter(base)).toEqual({});
  });

  it("carries goals and stages but never a tier", () => {
    const state = setStageFilter(setGoalFilter(base, ["G1", "G2"]), ["data_analysis"]);
    const filter = activeFilter(state);
    expect(filter).toEqual({ goals: ["G1", "G2"], stages: ["data_analysis"] });
    expect(Object.keys(filter)).not.toContain("tier");
  });

  it("omits a filter dimension that is unrestricted", () => {
    const goalsOnly = activeFilter(setGoalFilter(base, ["G2"]));
    expect(goalsOnly).toEqual({ goals: ["G2"] });
  });
});

describe("parseSelection", () => {
  it("splits a comma-separated filter box value", () => {
    expect(parseSelection("G1, G2")).toEqual(["G1", "G2"]);
  });

  it("drops empties and duplicates", () => {
    expect(parseSelection(" ,G1,,G1 , ")).toEqual(["G1"]);
    expect(parseSelection("")).toEqual([]);
  });
});
