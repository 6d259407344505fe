import { afterEach, describe, expect, it, vi } from "vitest";

import { EditServiceClient, toBase64 } from "../src/api.js";

const BASE = "http://service.test";

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("toBase64", () => {
  it("encodes bytes", () => {
    expect(toBase64(new Uint8Array([80, 53, 10]))).toBe("UDUK");
  });
});

describe("client", () => {
  it("submits the run config and returns the job", async () => {
    const fetchMock = vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ id: "j1", state: "queued" }, 202),
    );
    const client = new EditServiceClient(BASE);
    const job = await client.submitEdit({
      source: { b64: "AA==" }, exemplars: [{ b64: "AA==" }], maps: [{ b64: "AA==" }],
      T: 50, t_ds_max: 20, threshold: "linear", mode: "ancestral", seed: 1,
      world: { fixture: "two-texture" }, retain_steps: true,
    });
    expect(job.id).toBe("j1");
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe(`${BASE}/v1/edits`);
    expect(JSON.parse(String(init?.body)).t_ds_max).toBe(20);
  });

  it("surfaces field-level validation errors", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ detail: [{ kind: "value", path: "maps[0]", message: "bad" }] }, 400),
    );
    const client = new EditServiceClient(BASE);
    await expect(
      client.submitEdit({
        source: { b64: "" }, exemplars: [], maps: [],
        T: 1, t_ds_max: 1, threshold: "linear", mode: "ancestral", seed: 0,
        world: { fixture: "x" }, retain_steps: false,
      }),
    ).rejects.toThrow(/maps\[0\]/);
  });

  it("polls to completion", async () => {
    const states = [
      { id: "j2", state: "queued" },
      { id: "j2", state: "running", step: 3, total_steps: 10 },
      { id: "j2", state: "done", links: { result: "/v1/edits/j2/result", steps: [] } },
    ];
    let call = 0;
    vi.spyOn(globalThis, "fetch").mockImplementation(async () => jsonResponse(states[Math.min(call++, 2)]));
    const client = new EditServiceClient(BASE);
    const seen: string[] = [];
    const done = await client.pollUntilDone("j2", {
      intervalMs: 1,
      onTick: (s) => seen.push(s.state),
    });
    expect(done.state).toBe("done");
    expect(seen).toContain("running");
  });

  it("raises on failed jobs", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ id: "j3", state: "failed", reason: "boom" }),
    );
    const client = new EditServiceClient(BASE);
    await expect(client.pollUntilDone("j3", { intervalMs: 1 })).rejects.toThrow(/boom/);
  });

  it("fetches result bytes raw", async () => {
    const payload = new Uint8Array([80, 53, 10, 49, 32, 49, 10, 50, 53, 53, 10, 7]);
    vi.spyOn(globalThis, "fetch").mockResolvedValue(new Response(payload.slice().buffer));
    const client = new EditServiceClient(BASE);
    const bytes = await client.fetchResultBytes("j4");
    expect([...bytes]).toEqual([...payload]);
  });
});
