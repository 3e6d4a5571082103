/** Hand-rolled SVG line charts with a keyboard-reachable cursor.
 *
 * The chart draws whatever series it is given; it never derives new values.
 * Axis end labels are passed in as strings by the caller (who takes them
 * verbatim from service data), so no displayed number is computed here —
 * only screen positions are.
 *
 * Interaction: pointer moves report the nearest data index, a click (or
 * Enter/Space on the focused chart) "picks" it, and Left/Right arrows move
 * the cursor one point at a time (PageUp/PageDown jump by ten).
 */

export interface ChartSeries {
  ys: number[];
  color: string;
  name: string;
}

export interface ChartMarker {
  index: number;
  color: string;
  label: string;
}

export interface ChartSpec {
  xs: number[];
  series: ChartSeries[];
  xTitle: string;
  /** axis end labels, already formatted from service values */
  xEndLabels: [string, string] | null;
  yEndLabels: [string, string] | null;
  markers?: ChartMarker[];
  ariaLabel: string;
  onCursor?: (index: number | null) => void;
  onPick?: (index: number) => void;
}

const WIDTH = 640;
const HEIGHT = 240;
const MARGIN = { left: 56, right: 16, top: 14, bottom: 36 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;
const SVG_NS = "http://www.w3.org/2000/svg";

function finiteRange(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

/** Index of the x closest to the given value; xs is monotone ascending. */
export function nearestIndex(xs: number[], x: number): number {
  if (xs.length === 0) return 0;
  let lo = 0;
  let hi = xs.length - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (xs[mid]! < x) lo = mid;
    else hi = mid;
  }
  return Math.abs(xs[lo]! - x) <= Math.abs(xs[hi]! - x) ? lo : hi;
}

export function renderChart(container: HTMLElement, spec: ChartSpec): void {
  container.textContent = "";
  const { xs, series } = spec;
  const [xLo, xHi] = finiteRange(xs);
  const [yLo, yHi] = finiteRange(series.flatMap((s) => s.ys));
  const toX = (x: number) =>
    MARGIN.left + ((x - xLo) / (xHi - xLo)) * PLOT_W;
  const toY = (y: number) =>
    MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * PLOT_H;

  const svg = el("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    role: "application",
    "aria-label": spec.ariaLabel,
    tabindex: "0",
    class: "chart",
  });

  svg.append(
    el("rect", {
      x: String(MARGIN.left),
      y: String(MARGIN.top),
      width: String(PLOT_W),
      height: String(PLOT_H),
      class: "chart-plot-bg",
    }),
    el("line", {
      x1: String(MARGIN.left), y1: String(MARGIN.top + PLOT_H),
      x2: String(MARGIN.left + PLOT_W), y2: String(MARGIN.top + PLOT_H),
      class: "chart-axis",
    }),
    el("line", {
      x1: String(MARGIN.left), y1: String(MARGIN.top),
      x2: String(MARGIN.left), y2: String(MARGIN.top + PLOT_H),
      class: "chart-axis",
    }),
  );

  for (const s of series) {
    // split the polyline wherever a value is non-finite
    let points: string[] = [];
    const flush = () => {
      if (points.length > 1) {
        svg.append(el("polyline", {
          points: points.join(" "),
          fill: "none",
          stroke: s.color,
          "stroke-width": "1.5",
          "data-series": s.name,
        }));
      } else if (points.length === 1) {
        const [x, y] = points[0]!.split(",");
        svg.append(el("circle", {
          cx: x!, cy: y!, r: "2", fill: s.color, "data-series": s.name,
        }));
      }
      points = [];
    };
    for (let i = 0; i < xs.length; i++) {
      const y = s.ys[i]!;
      if (!Number.isFinite(y)) {
        flush();
        continue;
      }
      points.push(`${toX(xs[i]!)},${toY(y)}`);
    }
    flush();
  }

  for (const marker of spec.markers ?? []) {
    const x = toX(xs[marker.index] ?? xLo);
    svg.append(
      el("line", {
        x1: String(x), y1: String(MARGIN.top),
        x2: String(x), y2: String(MARGIN.top + PLOT_H),
        stroke: marker.color,
        "stroke-dasharray": "4 3",
        class: "chart-marker",
      }),
    );
    const text = el("text", {
      x: String(x + 3),
      y: String(MARGIN.top + 12),
      fill: marker.color,
      class: "chart-marker-label",
    });
    text.textContent = marker.label;
    svg.append(text);
  }

  const labels: [string, number, number, string][] = [];
  if (spec.xEndLabels) {
    labels.push(
      [spec.xEndLabels[0], MARGIN.left, HEIGHT - 18, "start"],
      [spec.xEndLabels[1], MARGIN.left + PLOT_W, HEIGHT - 18, "end"],
    );
  }
  if (spec.yEndLabels) {
    labels.push(
      [spec.yEndLabels[0], MARGIN.left - 6, MARGIN.top + PLOT_H, "end"],
      [spec.yEndLabels[1], MARGIN.left - 6, MARGIN.top + 10, "end"],
    );
  }
  labels.push([spec.xTitle, MARGIN.left + PLOT_W / 2, HEIGHT - 4, "middle"]);
  for (const [content, x, y, anchor] of labels) {
    const text = el("text", {
      x: String(x),
      y: String(y),
      "text-anchor": anchor,
      class: anchor === "middle" ? "chart-title" : "chart-tick",
    });
    text.textContent = content;
    svg.append(text);
  }

  const cursorLine = el("line", {
    y1: String(MARGIN.top),
    y2: String(MARGIN.top + PLOT_H),
    class: "chart-cursor",
    visibility: "hidden",
  });
  svg.append(cursorLine);

  let cursor: number | null = null;
  const showCursor = (index: number | null) => {
    cursor = index;
    if (index === null || xs.length === 0) {
      cursorLine.setAttribute("visibility", "hidden");
    } else {
      const x = String(toX(xs[index]!));
      cursorLine.setAttribute("x1", x);
      cursorLine.setAttribute("x2", x);
      cursorLine.setAttribute("visibility", "visible");
    }
    spec.onCursor?.(index);
  };

  const indexFromEvent = (event: MouseEvent): number | null => {
    const rect = svg.getBoundingClientRect();
    if (rect.width === 0 || xs.length === 0) return null;
    const frac =
      ((event.clientX - rect.left) / rect.width) * WIDTH;
    const x = xLo + ((frac - MARGIN.left) / PLOT_W) * (xHi - xLo);
    return nearestIndex(xs, x);
  };

  svg.addEventListener("pointermove", (event) => {
    showCursor(indexFromEvent(event));
  });
  svg.addEventListener("pointerleave", () => showCursor(null));
  svg.addEventListener("click", (event) => {
    const index = indexFromEvent(event);
    if (index !== null) {
      showCursor(index);
      spec.onPick?.(index);
    }
  });
  svg.addEventListener("keydown", (event) => {
    if (xs.length === 0) return;
    const step =
      event.key === "ArrowLeft" ? -1 :
      event.key === "ArrowRight" ? 1 :
      event.key === "PageDown" ? -10 :
      event.key === "PageUp" ? 10 : 0;
    if (step !== 0) {
      const next = Math.min(
        Math.max((cursor ?? 0) + step, 0), xs.length - 1);
      showCursor(next);
      event.preventDefault();
    } else if ((event.key === "Enter" || event.key === " ") &&
               cursor !== null) {
      spec.onPick?.(cursor);
      event.preventDefault();
    }
  });

  container.append(svg);
}
