import { describe, expect, it } from "vitest";

import { MapRaster } from "../src/raster.js";

const BRUSH = { radius: 3, intensity: 0.5, falloff: 2 };

describe("painting", () => {
  it("zero-intensity stroke leaves the raster unchanged", () => {
    const r = new MapRaster(8, 8, 0.25);
    const before = r.values.slice();
    r.paintStroke([{ x: 4, y: 4 }], { ...BRUSH, intensity: 0 });
    expect(r.values).toEqual(before);
  });

  it("full-intensity fill saturates to 1", () => {
    const r = new MapRaster(8, 8, 0.1);
    r.fill(1.0);
    expect([...r.values].every((v) => v === 1)).toBe(true);
  });

  it("hard full-coverage stroke also saturates", () => {
    const r = new MapRaster(4, 4, 0);
    r.paintStroke([{ x: 2, y: 2 }], { radius: 10, intensity: 1, falloff: 0 });
    expect([...r.values].every((v) => v === 1)).toBe(true);
  });

  it("soft brush decays away from the center", () => {
    const r = new MapRaster(9, 9, 0);
    r.paintStroke([{ x: 4, y: 4 }], { radius: 4, intensity: 1, falloff: 2 });
    expect(r.at(4, 4)).toBeGreaterThan(r.at(6, 4));
    expect(r.at(6, 4)).toBeGreaterThan(r.at(8, 8));
    expect(r.at(8, 8)).toBe(0); // beyond the radius
  });

  it("values stay clamped in [0, 1] under repeated strokes", () => {
    const r = new MapRaster(6, 6, 0.8);
    for (let i = 0; i < 5; i++) r.paintStroke([{ x: 3, y: 3 }], BRUSH);
    for (let i = 0; i < 12; i++) r.paintStroke([{ x: 3, y: 3 }], { ...BRUSH, intensity: -0.7 });
    expect(Math.max(...r.values)).toBeLessThanOrEqual(1);
    expect(Math.min(...r.values)).toBeGreaterThanOrEqual(0);
  });

  it("a stroke path covers its whole trail", () => {
    const r = new MapRaster(16, 4, 0);
    r.paintStroke(
      Array.from({ length: 14 }, (_, i) => ({ x: i + 1, y: 2 })),
      { radius: 1, intensity: 1, falloff: 0 },
    );
    for (let x = 1; x <= 14; x++) expect(r.at(x, 2)).toBe(1);
  });
});

describe("undo", () => {
  it("restores the prior raster byte-exactly", () => {
    const r = new MapRaster(8, 8, 0.3);
    const before = r.values.slice();
    r.paintStroke([{ x: 2, y: 2 }], BRUSH);
    expect(r.values).not.toEqual(before);
    expect(r.undo()).toBe(true);
    expect(r.values).toEqual(before);
  });

  it("stacks across strokes and fills", () => {
    const r = new MapRaster(4, 4, 0);
    r.paintStroke([{ x: 1, y: 1 }], BRUSH);
    const afterStroke = r.values.slice();
    r.fill(1);
    r.undo();
    expect(r.values).toEqual(afterStroke);
    r.undo();
    expect([...r.values].every((v) => v === 0)).toBe(true);
    expect(r.undo()).toBe(false);
  });
});

describe("export / import", () => {
  it("round-trips within one quantization step per pixel", () => {
    const r = new MapRaster(10, 7);
    r.paintStroke([{ x: 5, y: 3 }], { radius: 5, intensity: 0.8, falloff: 1.5 });
    const back = MapRaster.importMap(r.exportMap());
    expect(back.width).toBe(10);
    expect(back.height).toBe(7);
    for (let i = 0; i < r.values.length; i++) {
      expect(Math.abs(back.values[i] - r.values[i])).toBeLessThanOrEqual(1 / 255);
    }
  });

  it("all-half raster exports to byte 128", () => {
    const r = new MapRaster(2, 2, 0.5);
    const bytes = r.exportMap();
    expect([...bytes.slice(-4)]).toEqual([128, 128, 128, 128]);
  });

  it("all-zero raster exports to zero bytes", () => {
    const r = new MapRaster(2, 2, 0);
    expect([...r.exportMap().slice(-4)]).toEqual([0, 0, 0, 0]);
  });
});
