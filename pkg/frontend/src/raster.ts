/**
 * The paintable edit-map raster: float values in [0, 1], soft additive
 * brush, byte-exact undo. All editing math that matters to the algorithm
 * lives server-side; this file only accumulates brush weight and clamps.
 */

import { decodePnm, encodeGraymap } from "./pnm.js";

export interface Brush {
  radius: number;
  /** signed: positive paints toward 1 (keep source), negative erases */
  intensity: number;
  /** falloff exponent; 0 = hard disc, larger = softer edge */
  falloff: number;
}

export interface StrokePoint {
  x: number;
  y: number;
}

export class MapRaster {
  readonly width: number;
  readonly height: number;
  values: Float64Array;
  private undoStack: Float64Array[] = [];
  private readonly undoLimit = 64;

  constructor(width: number, height: number, fill = 0) {
    if (width <= 0 || height <= 0) throw new Error(`bad raster dims ${width}x${height}`);
    this.width = width;
    this.height = height;
    this.values = new Float64Array(width * height).fill(fill);
  }

  at(x: number, y: number): number {
    return this.values[y * this.width + x];
  }

  private pushUndo(): void {
    this.undoStack.push(this.values.slice());
    if (this.undoStack.length > this.undoLimit) this.undoStack.shift();
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.values = prev;
    return true;
  }

  /** Additive soft brush along a stroke path, clamped to [0, 1]. */
  paintStroke(path: StrokePoint[], brush: Brush): void {
    this.pushUndo();
    if (brush.intensity === 0 || path.length === 0) return;
    const weight = new Float64Array(this.width * this.height);
    const r = Math.max(0, brush.radius);
    for (const p of path) {
      const x0 = Math.max(0, Math.floor(p.x - r));
      const x1 = Math.min(this.width - 1, Math.ceil(p.x + r));
      const y0 = Math.max(0, Math.floor(p.y - r));
      const y1 = Math.min(this.height - 1, Math.ceil(p.y + r));
      for (let y = y0; y <= y1; y++) {
        for (let x = x0; x <= x1; x++) {
          const d = Math.hypot(x - p.x, y - p.y);
          if (d > r) continue;
          const w = brush.falloff <= 0 ? 1 : Math.pow(1 - d / (r || 1), brush.falloff);
          const idx = y * this.width + x;
          if (w > weight[idx]) weight[idx] = w; // max over path, not per-point stacking
        }
      }
    }
    for (let i = 0; i < this.values.length; i++) {
      if (weight[i] > 0) {
        this.values[i] = Math.min(1, Math.max(0, this.values[i] + brush.intensity * weight[i]));
      }
    }
  }

  fill(value: number): void {
    this.pushUndo();
    const v = Math.min(1, Math.max(0, value));
    this.values.fill(v);
  }

  /** P5 bytes, [0,1] -> [0,255], round half away from zero. */
  exportMap(): Uint8Array {
    return encodeGraymap(this.values, this.width, this.height);
  }

  static importMap(bytes: Uint8Array): MapRaster {
    const img = decodePnm(bytes);
    if (img.channels !== 1) throw new Error("edit maps must be P5 graymaps");
    const raster = new MapRaster(img.width, img.height);
    raster.values.set(img.data);
    return raster;
  }
}
