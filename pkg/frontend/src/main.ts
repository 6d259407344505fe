/**
 * Map-painter app: load source/exemplar pixmaps, paint the edit map,
 * choose threshold/strength/seed, submit to the service, review the result
 * and its per-step masks, and keep prior runs side by side for comparison.
 */

import { EditServiceClient, toBase64, type JobStatus, type ThresholdCurve } from "./api.js";
import { decodePnm, encodePnm, type PnmImage } from "./pnm.js";
import { Brush, MapRaster } from "./raster.js";
import { drawImageToCanvas, drawMapOverlay, drawThresholdCurves } from "./view.js";

const SCALE = 6;

interface RunRecord {
  jobId: string;
  label: string;
  resultBytes: Uint8Array;
  steps: number[];
}

class App {
  client: EditServiceClient;
  source: { bytes: Uint8Array; img: PnmImage } | null = null;
  exemplar: { bytes: Uint8Array; img: PnmImage } | null = null;
  raster: MapRaster | null = null;
  thresholds: ThresholdCurve[] = [];
  history: RunRecord[] = [];
  currentSteps: Map<number, Uint8Array> = new Map();
  busy = false;

  constructor(readonly root: Document) {
    const base = (root.getElementById("base-url") as HTMLInputElement).value;
    this.client = new EditServiceClient(base);
  }

  el<T extends HTMLElement>(id: string): T {
    const node = this.root.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  brush(): Brush {
    const sign = (this.el<HTMLSelectElement>("brush-mode").value === "erase") ? -1 : 1;
    return {
      radius: Number(this.el<HTMLInputElement>("brush-radius").value),
      intensity: sign * Number(this.el<HTMLInputElement>("brush-intensity").value),
      falloff: Number(this.el<HTMLInputElement>("brush-falloff").value),
    };
  }

  status(text: string): void {
    this.el("status").textContent = text;
  }

  redrawCanvas(): void {
    if (!this.source || !this.raster) return;
    drawImageToCanvas(this.el<HTMLCanvasElement>("paint-under"), this.source.img, SCALE);
    drawMapOverlay(
      this.el<HTMLCanvasElement>("paint-over"),
      this.raster.values, this.raster.width, this.raster.height, SCALE,
    );
  }

  async loadImage(file: File, slot: "source" | "exemplar"): Promise<void> {
    const bytes = new Uint8Array(await file.arrayBuffer());
    const img = decodePnm(bytes);
    if (slot === "source") {
      this.source = { bytes, img };
      this.raster = new MapRaster(img.width, img.height, 1.0); // start fully kept
      this.redrawCanvas();
    } else {
      this.exemplar = { bytes, img };
      drawImageToCanvas(this.el<HTMLCanvasElement>("exemplar-preview"), img, SCALE);
    }
    this.status(`loaded ${slot}: ${img.width}x${img.height} (${img.channels} ch)`);
  }

  bindPainting(): void {
    const over = this.el<HTMLCanvasElement>("paint-over");
    let path: { x: number; y: number }[] = [];
    let painting = false;
    const toCell = (ev: PointerEvent) => {
      const rect = over.getBoundingClientRect();
      return {
        x: ((ev.clientX - rect.left) / rect.width) * (this.raster?.width ?? 1),
        y: ((ev.clientY - rect.top) / rect.height) * (this.raster?.height ?? 1),
      };
    };
    over.addEventListener("pointerdown", (ev) => {
      if (!this.raster) return;
      painting = true;
      path = [toCell(ev)];
      over.setPointerCapture(ev.pointerId);
    });
    over.addEventListener("pointermove", (ev) => {
      if (!painting || !this.raster) return;
      path.push(toCell(ev));
      // live preview: paint incrementally on a throwaway copy is overkill;
      // just stroke on pointerup, but show the cursor trail meanwhile
    });
    over.addEventListener("pointerup", () => {
      if (!painting || !this.raster) return;
      painting = false;
      this.raster.paintStroke(path, this.brush());
      path = [];
      this.redrawCanvas();
    });
  }

  async refreshCatalogs(): Promise<void> {
    const worlds = await this.client.fetchWorlds();
    const select = this.el<HTMLSelectElement>("world-select");
    select.innerHTML = "";
    for (const w of worlds) {
      const opt = this.root.createElement("option");
      opt.value = w.name;
      opt.textContent = `${w.name} (${w.shape.join("x")}, ${w.n_components} comps)`;
      select.appendChild(opt);
    }
    const catalog = await this.client.fetchThresholds();
    this.thresholds = catalog.kinds;
    this.redrawCurves();
  }

  redrawCurves(): void {
    drawThresholdCurves(
      this.el<HTMLCanvasElement>("threshold-chart"),
      this.thresholds,
      this.el<HTMLSelectElement>("threshold-select").value,
    );
  }

  async run(): Promise<void> {
    if (!this.source || !this.exemplar || !this.raster) {
      this.status("load a source and an exemplar first");
      return;
    }
    if (this.busy) return;
    this.busy = true;
    try {
      const T = Number(this.el<HTMLInputElement>("steps-input").value);
      const request = {
        source: { b64: toBase64(this.source.bytes) },
        exemplars: [{ b64: toBase64(this.exemplar.bytes) }],
        maps: [{ b64: toBase64(this.raster.exportMap()) }],
        T,
        t_ds_max: Number(this.el<HTMLInputElement>("tds-slider").value),
        threshold: this.el<HTMLSelectElement>("threshold-select").value,
        mode: "ancestral",
        seed: Number(this.el<HTMLInputElement>("seed-input").value),
        world: { fixture: this.el<HTMLSelectElement>("world-select").value },
        retain_steps: true,
      };
      this.status("submitting...");
      const submitted = await this.client.submitEdit(request);
      const done = await this.client.pollUntilDone(submitted.id, {
        onTick: (s: JobStatus) => {
          if (s.state === "running") this.status(`running step ${s.step}/${s.total_steps}`);
        },
      });
      const resultBytes = await this.client.fetchResultBytes(submitted.id);
      const steps = (done.links?.steps ?? [])
        .map((link) => Number(link.split("/").pop()))
        .sort((a, b) => b - a);
      const record: RunRecord = {
        jobId: submitted.id,
        label: `${request.threshold} / strength ${request.t_ds_max} / seed ${request.seed}`,
        resultBytes,
        steps,
      };
      this.history.unshift(record);
      this.renderHistory();
      await this.showRun(record);
      this.status(`done: job ${submitted.id}`);
    } catch (err) {
      this.status(String(err));
    } finally {
      this.busy = false;
    }
  }

  async showRun(record: RunRecord): Promise<void> {
    drawImageToCanvas(this.el<HTMLCanvasElement>("result-canvas"), decodePnm(record.resultBytes), SCALE);
    this.el("result-label").textContent = record.label;
    this.currentSteps.clear();
    const scrub = this.el<HTMLInputElement>("step-scrubber");
    scrub.min = "0";
    scrub.max = String(Math.max(0, record.steps.length - 1));
    scrub.value = "0";
    scrub.dataset.jobId = record.jobId;
    scrub.dataset.steps = JSON.stringify(record.steps);
    await this.showStep(record.jobId, record.steps, 0);
  }

  async showStep(jobId: string, steps: number[], index: number): Promise<void> {
    if (steps.length === 0) return;
    const t = steps[Math.min(index, steps.length - 1)];
    let bytes = this.currentSteps.get(t);
    if (!bytes) {
      bytes = await this.client.fetchStepMask(jobId, t);
      this.currentSteps.set(t, bytes);
    }
    drawImageToCanvas(this.el<HTMLCanvasElement>("mask-canvas"), decodePnm(bytes), SCALE);
    this.el("mask-label").textContent = `mask at t = ${t} (${index + 1}/${steps.length})`;
  }

  renderHistory(): void {
    const strip = this.el("history-strip");
    strip.innerHTML = "";
    this.history.slice(0, 8).forEach((record) => {
      const cell = this.root.createElement("div");
      cell.className = "history-cell";
      const canvas = this.root.createElement("canvas");
      drawImageToCanvas(canvas, decodePnm(record.resultBytes), 2);
      const label = this.root.createElement("div");
      label.textContent = record.label;
      cell.appendChild(canvas);
      cell.appendChild(label);
      cell.addEventListener("click", () => void this.showRun(record));
      strip.appendChild(cell);
    });
  }

  bind(): void {
    this.el<HTMLInputElement>("source-file").addEventListener("change", (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (file) void this.loadImage(file, "source");
    });
    this.el<HTMLInputElement>("exemplar-file").addEventListener("change", (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (file) void this.loadImage(file, "exemplar");
    });
    this.el("fill-button").addEventListener("click", () => {
      this.raster?.fill(1.0);
      this.redrawCanvas();
    });
    this.el("clear-button").addEventListener("click", () => {
      this.raster?.fill(0.0);
      this.redrawCanvas();
    });
    this.el("undo-button").addEventListener("click", () => {
      this.raster?.undo();
      this.redrawCanvas();
    });
    this.el("export-button").addEventListener("click", () => {
      if (!this.raster) return;
      const bytes = this.raster.exportMap();
      const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "image/x-portable-graymap" });
      const a = this.root.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "edit-map.pgm";
      a.click();
    });
    this.el("run-button").addEventListener("click", () => void this.run());
    this.el<HTMLSelectElement>("threshold-select").addEventListener("change", () => this.redrawCurves());
    this.el<HTMLInputElement>("tds-slider").addEventListener("input", () => {
      this.el("tds-value").textContent = this.el<HTMLInputElement>("tds-slider").value;
    });
    this.el<HTMLInputElement>("steps-input").addEventListener("change", () => {
      const T = Number(this.el<HTMLInputElement>("steps-input").value);
      const slider = this.el<HTMLInputElement>("tds-slider");
      slider.max = String(T);
      if (Number(slider.value) > T) slider.value = String(T);
      this.el("tds-value").textContent = slider.value;
    });
    this.el<HTMLInputElement>("step-scrubber").addEventListener("input", (ev) => {
      const scrub = ev.target as HTMLInputElement;
      const steps = JSON.parse(scrub.dataset.steps ?? "[]") as number[];
      const jobId = scrub.dataset.jobId;
      if (jobId) void this.showStep(jobId, steps, Number(scrub.value));
    });
    this.el("base-url").addEventListener("change", () => {
      this.client = new EditServiceClient(this.el<HTMLInputElement>("base-url").value);
      void this.refreshCatalogs();
    });
    this.bindPainting();
  }
}

export function start(): void {
  const app = new App(document);
  app.bind();
  void app.refreshCatalogs().catch((err) => app.status(`service unreachable: ${err}`));
}

if (typeof document !== "undefined" && document.getElementById("paint-over")) {
  start();
}
