/** Client-side clamping of the extraction-band geometry.
 *
 * Drag handles and numeric inputs may wander anywhere; before a value is
 * stored or sent it is snapped to the nearest legal geometry for the image,
 * so interactive edits can never produce an out-of-bounds request. The rules
 * mirror the service's geometry invariants: the band of rows
 * [row - half, row + half] and the column range [col_start, col_end]
 * (inclusive) must both lie inside the image.
 */

import type { GeometryDraft } from "./api.js";

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}

export function clampGeometry(
  draft: GeometryDraft,
  imageWidth: number,
  imageHeight: number,
): GeometryDraft {
  const maxHalf = Math.floor((imageHeight - 1) / 2);
  const half = clamp(Math.round(draft.band_half_width), 0, maxHalf);
  const row = clamp(Math.round(draft.row), half, imageHeight - 1 - half);
  const colStart = clamp(Math.round(draft.col_start), 0, imageWidth - 1);
  const colEnd = clamp(Math.round(draft.col_end), colStart, imageWidth - 1);
  return { row, band_half_width: half, col_start: colStart, col_end: colEnd };
}

/** True when the geometry already satisfies every bound for the image. */
export function geometryInBounds(
  g: GeometryDraft,
  imageWidth: number,
  imageHeight: number,
): boolean {
  return (
    Number.isInteger(g.row) &&
    Number.isInteger(g.band_half_width) &&
    Number.isInteger(g.col_start) &&
    Number.isInteger(g.col_end) &&
    g.band_half_width >= 0 &&
    g.row - g.band_half_width >= 0 &&
    g.row + g.band_half_width <= imageHeight - 1 &&
    g.col_start >= 0 &&
    g.col_start <= g.col_end &&
    g.col_end <= imageWidth - 1
  );
}
