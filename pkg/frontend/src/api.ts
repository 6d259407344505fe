/**
 * Typed client for the edit service /v1 endpoints. The UI performs no
 * editing math; everything algorithmic comes back from these calls.
 */

export interface ImageRef {
  b64: string;
}

export interface EditRequest {
  source: ImageRef;
  exemplars: ImageRef[];
  maps: ImageRef[];
  T: number;
  t_ds_max: number;
  threshold: string;
  mode: string;
  seed: number;
  world: { fixture: string } | Record<string, unknown> | string;
  retain_steps: boolean;
  idempotency_key?: string;
  op?: string;
}

export interface JobStatus {
  id: string;
  state: "queued" | "running" | "done" | "failed";
  step?: number;
  total_steps?: number;
  reason?: string;
  links?: { result: string; steps: string[] };
}

export interface ThresholdCurve {
  kind: string;
  values: number[];
  auc: number;
}

export interface WorldInfo {
  name: string;
  shape: number[];
  n_components: number;
}

export function toBase64(bytes: Uint8Array): string {
  if (typeof Buffer !== "undefined") {
    return Buffer.from(bytes).toString("base64");
  }
  let binary = "";
  for (let i = 0; i < bytes.length; i++) binary += String.fromCharCode(bytes[i]);
  return btoa(binary);
}

async function expectOk(res: Response, what: string): Promise<Response> {
  if (!res.ok) {
    let detail = "";
    try {
      detail = JSON.stringify((await res.json()).detail);
    } catch {
      detail = await res.text().catch(() => "");
    }
    throw new Error(`${what}: HTTP ${res.status} ${detail}`);
  }
  return res;
}

export class EditServiceClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async submitEdit(request: EditRequest): Promise<JobStatus> {
    const res = await fetch(this.url("/v1/edits"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    await expectOk(res, "submit edit");
    return (await res.json()) as JobStatus;
  }

  async getJob(id: string): Promise<JobStatus> {
    const res = await fetch(this.url(`/v1/edits/${id}`));
    await expectOk(res, `poll job ${id}`);
    return (await res.json()) as JobStatus;
  }

  async pollUntilDone(
    id: string,
    opts: { intervalMs?: number; timeoutMs?: number; onTick?: (s: JobStatus) => void } = {},
  ): Promise<JobStatus> {
    const interval = opts.intervalMs ?? 150;
    const deadline = Date.now() + (opts.timeoutMs ?? 60_000);
    for (;;) {
      const status = await this.getJob(id);
      opts.onTick?.(status);
      if (status.state === "done") return status;
      if (status.state === "failed") throw new Error(`job ${id} failed: ${status.reason}`);
      if (Date.now() > deadline) throw new Error(`job ${id} timed out`);
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }

  async fetchResultBytes(id: string): Promise<Uint8Array> {
    const res = await fetch(this.url(`/v1/edits/${id}/result`));
    await expectOk(res, `fetch result ${id}`);
    return new Uint8Array(await res.arrayBuffer());
  }

  async fetchStepMask(id: string, t: number): Promise<Uint8Array> {
    const res = await fetch(this.url(`/v1/edits/${id}/steps/${t}`));
    await expectOk(res, `fetch mask ${id}/${t}`);
    return new Uint8Array(await res.arrayBuffer());
  }

  async fetchThresholds(): Promise<{ n: number; kinds: ThresholdCurve[] }> {
    const res = await fetch(this.url("/v1/thresholds"));
    await expectOk(res, "fetch thresholds");
    return (await res.json()) as { n: number; kinds: ThresholdCurve[] };
  }

  async fetchWorlds(): Promise<WorldInfo[]> {
    const res = await fetch(this.url("/v1/worlds"));
    await expectOk(res, "fetch worlds");
    return ((await res.json()) as { worlds: WorldInfo[] }).worlds;
  }
}
