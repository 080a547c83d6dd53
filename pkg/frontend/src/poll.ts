/**
 * Digest polling: notice concurrent changes on the server.
 *
 * At a configurable interval the poller asks the service for the case digest
 * and reports when it no longer matches the digest of the view the client
 * last rendered. There is no client-side merging — the app just prompts the
 * reviewer to refresh.
 */

import type { ReviewApi } from "./api.js";

export interface DigestPollOptions {
  api: ReviewApi;
  caseId: string;
  intervalMs: number;
  /** Digest of the view currently on screen; null while nothing is rendered. */
  knownDigest: () => string | null;
  /** Called when the server digest differs from the known one. */
  onStale: (serverDigest: string) => void;
  /** Called when a poll request fails (service unreachable, etc.). */
  onError?: (error: unknown) => void;
  /** Called after every successful poll, stale or not. */
  onHealthy?: () => void;
}

/** Start polling; returns a function that stops it. */
export function startDigestPoll(options: DigestPollOptions): () => void {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const tick = async () => {
    if (stopped) return;
    try {
      const report = await options.api.getStatus(options.caseId);
      if (!stopped) {
        options.onHealthy?.();
        const known = options.knownDigest();
        if (known !== null && report.digest !== known) {
          options.onStale(report.digest);
        }
      }
    } catch (error) {
      if (!stopped) options.onError?.(error);
    }
    if (!stopped) timer = setTimeout(tick, options.intervalMs);
  };

  timer = setTimeout(tick, options.intervalMs);
  return () => {
    stopped = true;
    if (timer !== null) clearTimeout(timer);
  };
}
