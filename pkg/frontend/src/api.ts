/**
 * Thin typed client over the v1 HTTP JSON API. Every mutation resolves only
 * with the server's acknowledged state; connection failures surface as
 * ConnectionLostError so the shell can show the retry banner.
 */

import type {
  ApplyResponse,
  CreateResponse,
  HintResponse,
  MatrixJson,
  Mode,
  RowOp,
  SessionState,
  Transcript,
  WhatIfResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ConnectionLostError extends Error {
  constructor(cause: unknown) {
    super(`connection to the engine lost: ${String(cause)}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class BenchApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ConnectionLostError(cause);
    }
    const payload: unknown = await response.json();
    if (!response.ok) {
      const failure = payload as { code?: string; message?: string };
      throw new ApiError(
        response.status,
        failure.code ?? "error",
        failure.message ?? `request failed with ${response.status}`,
      );
    }
    return payload as T;
  }

  createSession(matrix: MatrixJson, mode: Mode, b?: string[]): Promise<CreateResponse> {
    const body: Record<string, unknown> = { matrix, mode };
    if (b !== undefined) body.b = b;
    return this.request<CreateResponse>("POST", "/v1/session", body);
  }

  getState(id: string): Promise<SessionState> {
    return this.request<SessionState>("GET", `/v1/session/${id}`);
  }

  applyOp(id: string, op: RowOp): Promise<ApplyResponse> {
    return this.request<ApplyResponse>("POST", `/v1/session/${id}/op`, { op });
  }

  hint(id: string): Promise<HintResponse> {
    return this.request<HintResponse>("POST", `/v1/session/${id}/hint`);
  }

  whatIf(id: string, op: RowOp): Promise<WhatIfResponse> {
    return this.request<WhatIfResponse>("POST", `/v1/session/${id}/whatif`, { op });
  }

  exportTranscript(id: string): Promise<Transcript> {
    return this.request<Transcript>("GET", `/v1/session/${id}/export`);
  }
}
