/**
 * Typed client for the review service's /api/v1 HTTP contract.
 *
 * Every request carries the session tier in the X-Viewer-Tier header and the
 * client never sends a `tier` query parameter, so it can only ever ask the
 * server to narrow visibility, never to widen it. The fetch implementation is
 * injectable so tests and non-browser hosts can supply their own.
 */

import type {
  AudienceTier,
  CaseDocument,
  CaseSummary,
  ChallengePayload,
  DiffReport,
  ProblemPayload,
  SnapshotInfo,
  StatusReport,
} from "./types.js";

/** Optional narrowing filters, mirroring the server's TierFilter semantics. */
export interface ViewFilter {
  goals?: readonly string[];
  stages?: readonly string[];
}

export interface ReviewApiOptions {
  /** Service origin, e.g. "http://127.0.0.1:8321". Empty string = same origin. */
  baseUrl: string;
  /** Session tier; fixed for the lifetime of the client. */
  tier: AudienceTier;
  /** Fetch implementation; defaults to the global fetch. */
  fetchImpl?: typeof fetch;
}

/** A non-2xx response, decoded from the service's problem JSON when present. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly pointer?: string;

  constructor(status: number, code: string, message: string, pointer?: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.pointer = pointer;
  }
}

function filterQuery(filter?: ViewFilter): string {
  if (!filter) return "";
  const params = new URLSearchParams();
  if (filter.goals && filter.goals.length > 0) {
    params.set("goals", filter.goals.join(","));
  }
  if (filter.stages && filter.stages.length > 0) {
    params.set("stages", filter.stages.join(","));
  }
  const text = params.toString();
  return text ? `?${text}` : "";
}

export class ReviewApi {
  readonly baseUrl: string;
  readonly tier: AudienceTier;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ReviewApiOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.tier = options.tier;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  async listCases(): Promise<CaseSummary[]> {
    const body = await this.request("GET", "/cases");
    return (body as { cases: CaseSummary[] }).cases;
  }

  async getCase(caseId: string, filter?: ViewFilter): Promise<CaseDocument> {
    const path = `/cases/${encodeURIComponent(caseId)}${filterQuery(filter)}`;
    return (await this.request("GET", path)) as CaseDocument;
  }

  async getStatus(caseId: string, filter?: ViewFilter): Promise<StatusReport> {
    const path = `/cases/${encodeURIComponent(caseId)}/status${filterQuery(filter)}`;
    return (await this.request("GET", path)) as StatusReport;
  }

  async listSnapshots(caseId: string): Promise<SnapshotInfo[]> {
    const path = `/cases/${encodeURIComponent(caseId)}/snapshots`;
    const body = await this.request("GET", path);
    return (body as { snapshots: SnapshotInfo[] }).snapshots;
  }

  async getDiff(caseId: string, from: string, to: string): Promise<DiffReport> {
    const params = new URLSearchParams({ from, to });
    const path = `/cases/${encodeURIComponent(caseId)}/diff?${params.toString()}`;
    return (await this.request("GET", path)) as DiffReport;
  }

  async submitChallenge(
    caseId: string,
    challenge: { target: string; author: string; text: string },
  ): Promise<ChallengePayload> {
    const path = `/cases/${encodeURIComponent(caseId)}/challenges`;
    return (await this.request("POST", path, challenge)) as ChallengePayload;
  }

  async resolveChallenge(
    caseId: string,
    challengeId: string,
    outcome: "withdrawn" | "resolved" | "sustained",
    note?: string,
  ): Promise<ChallengePayload> {
    const path =
      `/cases/${encodeURIComponent(caseId)}` +
      `/challenges/${encodeURIComponent(challengeId)}/resolve`;
    const body: Record<string, string> = { outcome };
    if (note !== undefined) body.note = note;
    return (await this.request("POST", path, body)) as ChallengePayload;
  }

  private async request(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const headers: Record<string, string> = { "X-Viewer-Tier": this.tier };
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    if (!response.ok) {
      throw await decodeProblem(response);
    }
    return response.json();
  }
}

async function decodeProblem(response: Response): Promise<ApiError> {
  let problem: Partial<ProblemPayload> = {};
  try {
    const parsed: unknown = await response.json();
    if (parsed && typeof parsed === "object") {
      problem = parsed as Partial<ProblemPayload>;
    }
  } catch {
    // Non-JSON error body; fall through to the generic mapping.
  }
  return new ApiError(
    response.status,
    typeof problem.code === "string" ? problem.code : `http-${response.status}`,
    typeof problem.message === "string"
      ? problem.message
      : `request failed with HTTP ${response.status}`,
    typeof problem.pointer === "string" ? problem.pointer : undefined,
  );
}
