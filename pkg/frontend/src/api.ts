/** HTTP client for the query service, with a stale-response guard.
 *
 * Every query gets a monotonically increasing sequence number; a response
 * is marked stale when a newer query was issued while it was in flight.
 * Stale responses must never reach the session state.
 */

import type { QueryRequest, QueryResponse } from "./types.js";

export interface FetchResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<FetchResponse>;

export interface QueryOutcome {
  response: QueryResponse;
  /** true when a newer query was issued after this one started */
  stale: boolean;
  seq: number;
}

export class ApiHttpError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private latestSeq = 0;

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async query(request: QueryRequest): Promise<QueryOutcome> {
    const seq = ++this.latestSeq;
    const resp = await this.fetchImpl(`${this.baseUrl}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!resp.ok) {
      const body = (await resp.json().catch(() => ({}))) as Record<string, string>;
      throw new ApiHttpError(
        resp.status,
        body.code ?? "http_error",
        body.message ?? `query failed with status ${resp.status}`,
        body.field,
      );
    }
    const response = (await resp.json()) as QueryResponse;
    return { response, stale: seq !== this.latestSeq, seq };
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchImpl(`${this.baseUrl}/health`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  async lookupAccounts(prefix: string): Promise<{ id: number; degree: number }[]> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/accounts?prefix=${encodeURIComponent(prefix)}`,
    );
    if (!resp.ok) return [];
    const body = (await resp.json()) as { accounts: { id: number; degree: number }[] };
    return body.accounts;
  }
}
