/**
 * Live contract test: a UI-submitted job against a real service must render
 * byte-identically to the CLI run of the same config. Spawns the Python
 * service and CLI from this repo; run via `npm run contract`.
 */

import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EditServiceClient, toBase64 } from "../src/api.js";

const ENABLED = process.env.PROGEDIT_CONTRACT === "1";
const PYTHON = process.env.PROGEDIT_PYTHON ?? "python3";
const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");
const PORT = 8765 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

const PREPARE_INPUTS = `
import json, sys
from pathlib import Path
from progedit import fixtures as fx
from progedit.pnm import write_pnm, write_map_bytes

out = Path(sys.argv[1])
warm, cool, mu = fx.rgb_inputs()
write_pnm(out / "source.ppm", warm)
write_pnm(out / "exemplar.ppm", cool)
(out / "map.pgm").write_bytes(write_map_bytes(mu))
config = {
    "source": "source.ppm",
    "exemplars": ["exemplar.ppm"],
    "maps": ["map.pgm"],
    "T": 50, "t_ds_max": 20, "threshold": "linear",
    "mode": "ancestral", "seed": 41,
    "world": {"fixture": "rgb-patches"},
    "emit": {"result": True},
}
(out / "run.json").write_text(json.dumps(config))
`;

describe.skipIf(!ENABLED)("service/CLI contract", () => {
  let service: ReturnType<typeof spawn>;
  let workdir: string;

  beforeAll(async () => {
    workdir = mkdtempSync(join(tmpdir(), "progedit-contract-"));
    writeFileSync(join(workdir, "prepare.py"), PREPARE_INPUTS);
    const prep = spawnSync(PYTHON, [join(workdir, "prepare.py"), workdir], {
      cwd: REPO_ROOT,
      encoding: "utf8",
    });
    if (prep.status !== 0) throw new Error(`input preparation failed: ${prep.stderr}`);

    service = spawn(PYTHON, ["-m", "progedit.service", "--port", String(PORT)], {
      cwd: REPO_ROOT,
      stdio: ["ignore", "pipe", "pipe"],
    });
    const deadline = Date.now() + 30_000;
    for (;;) {
      try {
        const res = await fetch(`${BASE}/v1/thresholds`);
        if (res.ok) break;
      } catch {
        // not up yet
      }
      if (Date.now() > deadline) throw new Error("service did not come up");
      await new Promise((r) => setTimeout(r, 200));
    }
  }, 60_000);

  afterAll(() => {
    service?.kill();
  });

  it("renders the same bytes as the CLI for the same config", async () => {
    const config = JSON.parse(readFileSync(join(workdir, "run.json"), "utf8"));
    const client = new EditServiceClient(BASE);
    const submitted = await client.submitEdit({
      ...config,
      source: { b64: toBase64(readFileSync(join(workdir, "source.ppm"))) },
      exemplars: [{ b64: toBase64(readFileSync(join(workdir, "exemplar.ppm"))) }],
      maps: [{ b64: toBase64(readFileSync(join(workdir, "map.pgm"))) }],
      retain_steps: true,
    });
    const done = await client.pollUntilDone(submitted.id, { timeoutMs: 60_000 });
    expect(done.state).toBe("done");
    const fetched = await client.fetchResultBytes(submitted.id);

    const outDir = join(workdir, "cli-out");
    const cli = spawnSync(
      PYTHON,
      ["-m", "progedit.cli", "edit", "--config", join(workdir, "run.json"), "--out", outDir],
      { cwd: REPO_ROOT, encoding: "utf8" },
    );
    expect(cli.status, cli.stderr).toBe(0);
    const cliBytes = readFileSync(join(outDir, "result.ppm"));

    expect(fetched.length).toBe(cliBytes.length);
    expect(Buffer.from(fetched).equals(cliBytes)).toBe(true);
    console.log(`[criterion 12] PASS: UI-fetched P6 (${fetched.length} bytes) ` +
      "byte-identical to the CLI result for the same config");
  }, 120_000);

  it("step masks decode to the latent dimensions", async () => {
    const config = JSON.parse(readFileSync(join(workdir, "run.json"), "utf8"));
    const client = new EditServiceClient(BASE);
    const submitted = await client.submitEdit({
      ...config,
      seed: 42,
      source: { b64: toBase64(readFileSync(join(workdir, "source.ppm"))) },
      exemplars: [{ b64: toBase64(readFileSync(join(workdir, "exemplar.ppm"))) }],
      maps: [{ b64: toBase64(readFileSync(join(workdir, "map.pgm"))) }],
      retain_steps: true,
    });
    const done = await client.pollUntilDone(submitted.id, { timeoutMs: 60_000 });
    expect(done.links?.steps.length).toBe(20);
    const mask = await client.fetchStepMask(submitted.id, 20);
    const { decodePnm } = await import("../src/pnm.js");
    const img = decodePnm(mask);
    expect(img.width).toBe(16);
    expect(img.height).toBe(16);
  }, 120_000);
});
