import { describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";

function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json; charset=utf-8", ...headers },
  });
}

describe("api client", () => {
  it("lists documents", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse([{ id: "x", version: 2 }]));
    const client = new Client("", fetchImpl);
    expect(await client.listDocuments("scenarios")).toEqual([{ id: "x", version: 2 }]);
    expect(fetchImpl.mock.calls[0]![0]).toBe("/v1/scenarios");
  });

  it("reads the version from the etag header", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({ a: 1 }, 200, { etag: "7" }));
    const client = new Client("http://svc", fetchImpl);
    const doc = await client.getDocument("workflows", "w");
    expect(doc).toEqual({ body: { a: 1 }, version: 7 });
    expect(fetchImpl).toHaveBeenCalledWith("http://svc/v1/workflows/w", undefined);
  });

  it("sends if-match on versioned updates and parses the new version", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({}, 200, { etag: "3" }));
    const client = new Client("", fetchImpl);
    const version = await client.putDocument("workflows", "w", { root: {} }, 2);
    expect(version).toBe(3);
    const [, init] = fetchImpl.mock.calls[0]!;
    expect(init?.method).toBe("PUT");
    expect((init?.headers as Record<string, string>)["if-match"]).toBe("2");
  });

  it("omits if-match on creation", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({}, 201, { etag: "1" }));
    const client = new Client("", fetchImpl);
    await client.putDocument("workflows", "w", {});
    const [, init] = fetchImpl.mock.calls[0]!;
    expect((init?.headers as Record<string, string>)["if-match"]).toBeUndefined();
  });

  it("surfaces validation diagnostics from a 400", async () => {
    const body = {
      error: "validation failed",
      diagnostics: [{ rule: "LevelChain", node_id: "t", message: "Task under Activity" }],
    };
    const client = new Client("", vi.fn(async () => jsonResponse(body, 400)));
    const err = await client.putDocument("workflows", "bad", {}).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.diagnostics[0].rule).toBe("LevelChain");
  });

  it("surfaces conflicts as ApiError 409", async () => {
    const client = new Client(
      "",
      vi.fn(async () => jsonResponse({ error: "stale version" }, 409)),
    );
    const err = await client.putDocument("workflows", "w", {}, 1).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toBe("stale version");
  });

  it("posts choices with the item payload", async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse({ prediction_next: "kiwi", accuracy_so_far: 1, status: "Open", remaining: {} }),
    );
    const client = new Client("", fetchImpl);
    const reply = await client.postChoice("sess-1", "banana");
    expect(reply.prediction_next).toBe("kiwi");
    const [url, init] = fetchImpl.mock.calls[0]!;
    expect(url).toBe("/v1/sessions/sess-1/choice");
    expect(JSON.parse(init!.body as string)).toEqual({ item: "banana" });
  });
});
