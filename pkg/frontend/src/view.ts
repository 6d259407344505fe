/** Canvas rendering helpers: decoded pixmaps and map overlays to pixels. */

import type { PnmImage } from "./pnm.js";
import type { ThresholdCurve } from "./api.js";

export function drawImageToCanvas(canvas: HTMLCanvasElement, img: PnmImage, scale = 6): void {
  canvas.width = img.width * scale;
  canvas.height = img.height * scale;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d context unavailable");
  const raw = document.createElement("canvas");
  raw.width = img.width;
  raw.height = img.height;
  const rawCtx = raw.getContext("2d")!;
  const pixels = rawCtx.createImageData(img.width, img.height);
  const n = img.width * img.height;
  for (let p = 0; p < n; p++) {
    const r = img.channels === 1 ? img.data[p] : img.data[3 * p];
    const g = img.channels === 1 ? img.data[p] : img.data[3 * p + 1];
    const b = img.channels === 1 ? img.data[p] : img.data[3 * p + 2];
    pixels.data[4 * p] = Math.round(r * 255);
    pixels.data[4 * p + 1] = Math.round(g * 255);
    pixels.data[4 * p + 2] = Math.round(b * 255);
    pixels.data[4 * p + 3] = 255;
  }
  rawCtx.putImageData(pixels, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(raw, 0, 0, canvas.width, canvas.height);
}

/** Tint the painted map over the source preview: dark = editable. */
export function drawMapOverlay(
  canvas: HTMLCanvasElement,
  values: Float64Array,
  width: number,
  height: number,
  scale = 6,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d context unavailable");
  canvas.width = width * scale;
  canvas.height = height * scale;
  const raw = document.createElement("canvas");
  raw.width = width;
  raw.height = height;
  const rawCtx = raw.getContext("2d")!;
  const pixels = rawCtx.createImageData(width, height);
  for (let p = 0; p < width * height; p++) {
    const mu = values[p];
    pixels.data[4 * p] = Math.round(255 * (1 - mu));
    pixels.data[4 * p + 1] = 64;
    pixels.data[4 * p + 2] = Math.round(255 * mu);
    pixels.data[4 * p + 3] = 110;
  }
  rawCtx.putImageData(pixels, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(raw, 0, 0, canvas.width, canvas.height);
}

export function drawThresholdCurves(
  canvas: HTMLCanvasElement,
  kinds: ThresholdCurve[],
  selected: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d context unavailable");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#555";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  const palette: Record<string, string> = {
    linear: "#7fb2ff",
    cubic: "#ff9e6d",
    quadratic: "#ffd166",
    log: "#8bd17c",
    sigmoid: "#d98bd1",
  };
  for (const curve of kinds) {
    ctx.beginPath();
    ctx.strokeStyle = palette[curve.kind] ?? "#999";
    ctx.lineWidth = curve.kind === selected ? 2.5 : 1;
    ctx.globalAlpha = curve.kind === selected ? 1.0 : 0.55;
    curve.values.forEach((v, i) => {
      const x = (i / (curve.values.length - 1)) * (width - 8) + 4;
      const y = height - 4 - v * (height - 8);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
  ctx.globalAlpha = 1.0;
}
