import { describe, expect, it } from "vitest";

import { ApiError, BenchApi, ConnectionLostError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("BenchApi", () => {
  it("posts the session body and returns the typed payload", async () => {
    const seen: { url?: string; body?: unknown } = {};
    const api = new BenchApi("http://engine", async (url, init) => {
      seen.url = url;
      seen.body = JSON.parse(String(init?.body));
      return jsonResponse(200, { id: "s1", state: { id: "s1" } });
    });
    const created = await api.createSession(
      { rows: 1, cols: 1, data: [["1"]] },
      "reduce_to_ref",
    );
    expect(seen.url).toBe("http://engine/v1/session");
    expect(seen.body).toEqual({
      matrix: { rows: 1, cols: 1, data: [["1"]] },
      mode: "reduce_to_ref",
    });
    expect(created.id).toBe("s1");
  });

  it("sends krylov start vectors verbatim", async () => {
    let body: unknown;
    const api = new BenchApi("http://engine", async (_url, init) => {
      body = JSON.parse(String(init?.body));
      return jsonResponse(200, { id: "s", state: {} });
    });
    await api.createSession({ rows: 1, cols: 1, data: [["2"]] }, "krylov", ["1/2"]);
    expect((body as { b: string[] }).b).toEqual(["1/2"]);
  });

  it("maps {code, message} failures to ApiError with the status", async () => {
    const api = new BenchApi("http://engine", async () =>
      jsonResponse(409, { code: "goal_reached", message: "done already" }),
    );
    const failure = await api.hint("s1").catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(409);
    expect((failure as ApiError).code).toBe("goal_reached");
  });

  it("wraps network failures as ConnectionLostError", async () => {
    const api = new BenchApi("http://engine", async () => {
      throw new TypeError("fetch failed");
    });
    const failure = await api.getState("s1").catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ConnectionLostError);
  });
});
