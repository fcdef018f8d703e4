/** Wire types of the query service's JSON API. */

export type Method = "ms" | "ac";

export interface StopRule {
  kind: "fixed_count" | "coverage_threshold";
  value: number;
}

export interface QueryRequest {
  seeds: number[];
  method: Method;
  stop: StopRule;
  community_detection: boolean;
  edge_threshold: number;
}

export interface RankedEntry {
  id: number;
  distance: number;
}

export interface CommunityPayload {
  vertices: number[];
  /** [vertex id, vertex id, similarity weight] */
  edges: [number, number, number][];
  /** vertex id (stringified) -> community index */
  labels: Record<string, number>;
  modularity: number;
}

export interface QueryTimings {
  lsh_ms: number;
  rank_ms: number;
  community_ms: number;
}

export interface QueryResponse {
  schema_version: number;
  ranked: RankedEntry[];
  stop_reason: string;
  coverage: number[] | null;
  community: CommunityPayload | null;
  timings: QueryTimings;
  warnings: { unindexed_seeds: number[] };
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}
