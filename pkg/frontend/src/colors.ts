/**
 * Status → color mapping.
 *
 * A pure lookup over the five-point status lattice, matching the palette the
 * service uses in its DOT exports so graphs look the same in both renderers:
 * Supported green, Assumed blue, Undeveloped grey, Contested amber,
 * Defeated red.
 */

import type { StatusLabel } from "./types.js";

export const STATUS_FILL: Record<StatusLabel, string> = {
  Supported: "#d5e8d4",
  Assumed: "#dae8fc",
  Undeveloped: "#eeeeee",
  Contested: "#ffe6cc",
  Defeated: "#f8cecc",
};

export const STATUS_STROKE: Record<StatusLabel, string> = {
  Supported: "#82b366",
  Assumed: "#6c8ebf",
  Undeveloped: "#999999",
  Contested: "#d79b00",
  Defeated: "#b85450",
};

function isStatusLabel(label: string): label is StatusLabel {
  return Object.prototype.hasOwnProperty.call(STATUS_FILL, label);
}

/** Fill color for a status label; unknown labels fall back to the grey of Undeveloped. */
export function statusFill(label: string): string {
  return isStatusLabel(label) ? STATUS_FILL[label] : STATUS_FILL.Undeveloped;
}

/** Border color paired with {@link statusFill}. */
export function statusStroke(label: string): string {
  return isStatusLabel(label) ? STATUS_STROKE[label] : STATUS_STROKE.Undeveloped;
}
