import { describe, expect, it } from "vitest";

import { clampGeometry, geometryInBounds } from "../src/geometry.js";

/** Deterministic pseudo-random stream for property checks. */
function* rng(seed: number): Generator<number> {
  let state = seed >>> 0;
  while (true) {
    state = (state * 1664525 + 1013904223) >>> 0;
    yield state / 2 ** 32;
  }
}

describe("clampGeometry", () => {
  it("snaps any drag, however wild, into the image bounds", () => {
    const stream = rng(7);
    const next = () => stream.next().value as number;
    for (let trial = 0; trial < 500; trial++) {
      const width = 2 + Math.floor(next() * 900);
      const height = 2 + Math.floor(next() * 200);
      const draft = {
        row: (next() - 0.5) * 4 * height,
        band_half_width: (next() - 0.25) * 2 * height,
        col_start: (next() - 0.5) * 4 * width,
        col_end: (next() - 0.5) * 4 * width,
      };
      const clamped = clampGeometry(draft, width, height);
      expect(geometryInBounds(clamped, width, height),
        JSON.stringify({ draft, clamped, width, height })).toBe(true);
    }
  });

  it("leaves a legal geometry unchanged", () => {
    const g = { row: 15, band_half_width: 5, col_start: 0, col_end: 180 };
    expect(clampGeometry(g, 181, 32)).toEqual(g);
  });

  it("survives the degenerate one-pixel image", () => {
    const clamped = clampGeometry(
      { row: 50, band_half_width: 50, col_start: -3, col_end: 99 }, 1, 1);
    expect(clamped).toEqual(
      { row: 0, band_half_width: 0, col_start: 0, col_end: 0 });
  });
});
