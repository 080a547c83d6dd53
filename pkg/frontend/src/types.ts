/**
 * Wire types for the review service's /api/v1 HTTP contract.
 *
 * These mirror the JSON payloads the service emits; the client treats the
 * server as authoritative and never re-derives what a payload already states.
 */

/** Visibility tiers, least to most privileged. */
export type AudienceTier = "public" | "stakeholder" | "auditor";

export const AUDIENCE_TIERS: readonly AudienceTier[] = [
  "public",
  "stakeholder",
  "auditor",
];

/** Review-phase labels as reported by the service. */
export type PhaseLabel = "preliminary" | "interim" | "operational";

/** Status labels for the five-point defeasibility lattice. */
export type StatusLabel =
  | "Supported"
  | "Assumed"
  | "Undeveloped"
  | "Contested"
  | "Defeated";

export const STATUS_LABELS: readonly StatusLabel[] = [
  "Supported",
  "Assumed",
  "Undeveloped",
  "Contested",
  "Defeated",
];

/** Element kinds as serialized in interchange documents. */
export type ElementKindLabel =
  | "Goal"
  | "PropertyClaim"
  | "EvidentialClaim"
  | "Evidence"
  | "Warrant"
  | "Context"
  | "Assumption";

/** Link kinds as serialized in interchange documents. */
export type LinkKindLabel = "supports" | "evidences" | "warrants" | "contextOf";

/** Lifecycle stage tokens accepted by the `stages` query parameter. */
export const STAGE_TOKENS: readonly string[] = [
  "project_planning",
  "problem_formulation",
  "data_extraction_procurement",
  "data_analysis",
  "preprocessing_feature_engineering",
  "model_selection",
  "model_training",
  "model_validation_testing",
  "model_reporting",
  "model_productionalization",
  "user_training",
  "system_use_monitoring",
  "model_updating_deprovisioning",
];

/** One row of `GET /api/v1/cases`. */
export interface CaseSummary {
  id: string;
  title: string;
  phase: PhaseLabel;
  digest: string;
  elements: number;
  openChallenges: number;
}

/** An element entry inside a case document. */
export interface ElementPayload {
  id: string;
  kind: ElementKindLabel;
  text: string;
  scope?: string;
  stage?: string;
  tier?: string;
  locator?: string;
  slots?: Record<string, string>;
}

/** A link entry inside a case document. */
export interface LinkPayload {
  id: string;
  kind: LinkKindLabel;
  from: string;
  to: string;
  qualifier?: { label: string };
}

/** A challenge record, as returned inline and by the challenge endpoints. */
export interface ChallengePayload {
  id: string;
  target: string;
  author: string;
  text: string;
  state: "open" | "withdrawn" | "resolved" | "sustained";
  resolutionNote?: string;
}

export interface AppraisalPayload {
  evidenceId: string;
  assessor?: string;
  date?: string;
  [key: string]: unknown;
}

/** `GET /api/v1/cases/{id}` — a tier-filtered interchange document. */
export interface CaseDocument {
  version: string;
  case: { id: string; title: string; phase: PhaseLabel };
  elements: ElementPayload[];
  links: LinkPayload[];
  challenges: ChallengePayload[];
  appraisals: AppraisalPayload[];
  /** How many elements the active tier filter withheld. */
  redactions: number;
}

/** `GET /api/v1/cases/{id}/status`. */
export interface StatusReport {
  digest: string;
  phase: PhaseLabel;
  statuses: Record<string, StatusLabel>;
}

/** One entry of `GET /api/v1/cases/{id}/snapshots`. */
export interface SnapshotInfo {
  label: string;
  takenAt: string;
  digest: string;
}

export interface FieldChangePayload {
  field: string;
  before: unknown;
  after: unknown;
}

export interface ModifiedEntryPayload {
  id: string;
  fields: FieldChangePayload[];
}

export interface ChangeSection {
  added: string[];
  removed: string[];
  modified: ModifiedEntryPayload[];
}

/** `GET /api/v1/cases/{id}/diff?from=A&to=B`. */
export interface DiffReport {
  from: string;
  to: string;
  empty: boolean;
  phaseChange: [PhaseLabel, PhaseLabel] | null;
  titleChange: [string, string] | null;
  elements: ChangeSection;
  links: ChangeSection;
  challenges: ChangeSection;
  statusDeltas: Record<string, { before: StatusLabel; after: StatusLabel }>;
  findings: { added: string[]; removed: string[] };
}

/** Error body the service sends with every non-2xx response. */
export interface ProblemPayload {
  code: string;
  message: string;
  pointer?: string;
}
