/** Calibrate tab: two clicks on the spectrum pin the anchor columns, their
 * wavelengths are typed in, and the service turns the pair into the
 * pixel-to-wavelength line. The x-axis is pixels until the session holds a
 * calibration, nanometres afterwards. */

import { nearestIndex, renderChart } from "../charts.js";
import { fmt, NO_VALUE } from "../format.js";
import { wavelengthForIndex } from "../state.js";
import type { ViewContext } from "./context.js";
import type { ChartMarker } from "../charts.js";

function pinRow(ctx: ViewContext, which: 0 | 1): HTMLElement {
  const pin = ctx.state.pins[which];
  const row = document.createElement("div");
  row.className = "field-row pin-row";
  const status = document.createElement("span");
  status.className = "pin-pixel value";
  status.dataset.value = `pin-${which}-pixel`;
  status.textContent = pin.pixel === null
    ? "no column picked"
    : `column ${fmt(pin.pixel)}`;
  if (ctx.state.nextPin === which && pin.pixel === null) {
    status.textContent += " (next chart click lands here)";
  }
  const label = document.createElement("label");
  label.className = "field";
  label.append(`anchor ${which + 1} wavelength (nm)`);
  const input = document.createElement("input");
  input.type = "number";
  input.step = "any";
  input.value = pin.wavelengthText;
  input.dataset.pin = String(which);
  input.addEventListener("change", () => {
    ctx.actions.setPinWavelength(which, input.value);
  });
  label.append(input);
  row.append(status, label);
  return row;
}

export function renderCalibrate(container: HTMLElement,
                                ctx: ViewContext): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Calibrate";
  container.append(heading);

  const cal = ctx.state.session?.wavelength_cal ?? null;
  const extract = ctx.state.lastExtract;

  const chartBox = document.createElement("div");
  chartBox.className = "chart-box";
  chartBox.id = "calibrate-chart";
  const readout = document.createElement("p");
  readout.className = "readout";
  readout.id = "calibrate-readout";
  readout.textContent = " ";

  if (extract) {
    const markers: ChartMarker[] = [];
    for (const [i, pin] of ctx.state.pins.entries()) {
      if (pin.pixel !== null) {
        markers.push({
          index: nearestIndex(extract.pixels, pin.pixel),
          color: "#8a2be2",
          label: `anchor ${i + 1}`,
        });
      }
    }
    const calibrated = cal !== null;
    const first = 0;
    const last = extract.pixels.length - 1;
    const nmFirst = wavelengthForIndex(ctx.state.session, first);
    const nmLast = wavelengthForIndex(ctx.state.session, last);
    renderChart(chartBox, {
      xs: extract.pixels,
      series: [{ name: "combined", ys: extract.combined, color: "#222222" }],
      xTitle: calibrated ? "wavelength (nm)" : "pixel (column)",
      xEndLabels: calibrated
        ? (nmFirst !== null && nmLast !== null
            ? [fmt(nmFirst), fmt(nmLast)]
            : null)
        : [fmt(extract.pixels[first] ?? 0), fmt(extract.pixels[last] ?? 0)],
      yEndLabels: null,
      markers,
      ariaLabel: "spectrum for anchor picking",
      onCursor: (index) => {
        if (index === null) {
          readout.textContent = " ";
          return;
        }
        const nm = wavelengthForIndex(ctx.state.session, index);
        const parts = [`pixel ${fmt(extract.pixels[index]!)}`];
        if (nm !== null) parts.push(`λ ${fmt(nm)} nm`);
        parts.push(`combined ${fmt(extract.combined[index]!)}`);
        readout.textContent = parts.join(", ");
      },
      onPick: (index) => ctx.actions.placeAnchor(index),
    });
  } else {
    chartBox.textContent =
      "extract a spectrum on the Capture tab, then pick anchors here";
  }
  container.append(chartBox, readout);

  container.append(pinRow(ctx, 0), pinRow(ctx, 1));

  const apply = document.createElement("button");
  apply.type = "button";
  apply.id = "apply-calibration";
  apply.textContent = "Apply calibration";
  apply.addEventListener("click", () => void ctx.actions.applyCalibration());
  container.append(apply);

  const panel = document.createElement("dl");
  panel.className = "record-panel";
  panel.id = "calibration-panel";
  const entries: [string, string][] = cal
    ? [
        ["anchor 1 column", fmt(cal.p1)],
        ["anchor 1 λ (nm)", fmt(cal.lambda1)],
        ["anchor 2 column", fmt(cal.p2)],
        ["anchor 2 λ (nm)", fmt(cal.lambda2)],
      ]
    : [["calibration", NO_VALUE]];
  for (const [term, value] of entries) {
    const dt = document.createElement("dt");
    dt.textContent = term;
    const dd = document.createElement("dd");
    dd.className = "value";
    dd.textContent = value;
    panel.append(dt, dd);
  }
  container.append(panel);
}
