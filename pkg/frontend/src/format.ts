/** Number presentation and wire-format revival.
 *
 * The service transports non-finite floats as the strings "NaN", "Infinity"
 * and "-Infinity"; `cellToNumber` turns such a cell back into a number.
 * `fmt` is the single way a number becomes display text: it never rounds,
 * so `Number(fmt(x))` is bit-identical to `x` for every double, and the
 * non-finite strings round-trip unchanged.
 */

export type NumberCell = number | "NaN" | "Infinity" | "-Infinity";

export function cellToNumber(cell: unknown): number {
  if (typeof cell === "number") return cell;
  if (cell === "NaN") return NaN;
  if (cell === "Infinity") return Infinity;
  if (cell === "-Infinity") return -Infinity;
  throw new TypeError(`expected a numeric cell, got ${JSON.stringify(cell)}`);
}

export function cellsToNumbers(cells: unknown): number[] {
  if (!Array.isArray(cells)) {
    throw new TypeError("expected an array of numeric cells");
  }
  return cells.map(cellToNumber);
}

export function fmt(x: number): string {
  if (Number.isNaN(x)) return "NaN";
  if (x === Infinity) return "Infinity";
  if (x === -Infinity) return "-Infinity";
  if (Object.is(x, -0)) return "-0";
  return String(x);
}

/** Optional variant: the placeholder an absent value renders as. */
export const NO_VALUE = "—";

export function fmtOr(x: number | null | undefined): string {
  return x === null || x === undefined ? NO_VALUE : fmt(x);
}
