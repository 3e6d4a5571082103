/** Measure tab: register the blank, measure dye photographs against it,
 * and collect (concentration, absorbance) samples at a chosen wavelength. */

import { renderChart } from "../charts.js";
import { fmt, fmtOr } from "../format.js";
import { renderImagePicker } from "./capture.js";
import type { ViewContext } from "./context.js";
import type { ChartMarker } from "../charts.js";

function samplesTable(ctx: ViewContext): HTMLElement {
  const samples = ctx.state.session?.samples ?? [];
  const table = document.createElement("table");
  table.id = "samples-table";
  const head = document.createElement("tr");
  for (const title of ["label", "concentration", "absorbance",
                       "λ (nm)", ""]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.append(th);
  }
  table.append(head);
  samples.forEach((sample, index) => {
    const tr = document.createElement("tr");
    const cells = [
      sample.label || `sample ${index + 1}`,
      fmt(sample.concentration),
      fmt(sample.absorbance),
      fmtOr(sample.wavelength_nm),
    ];
    for (const [i, text] of cells.entries()) {
      const td = document.createElement("td");
      if (i > 0) td.className = "value";
      td.textContent = text;
      tr.append(td);
    }
    const td = document.createElement("td");
    const remove = document.createElement("button");
    remove.type = "button";
    remove.textContent = "delete";
    remove.setAttribute("aria-label", `delete sample ${index + 1}`);
    remove.addEventListener("click", () =>
      void ctx.actions.removeSample(index));
    td.append(remove);
    tr.append(td);
    table.append(tr);
  });
  return table;
}

export function renderMeasure(container: HTMLElement,
                              ctx: ViewContext): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Measure";
  container.append(heading);

  const session = ctx.state.session;

  // --- blank ---
  const blankRow = document.createElement("div");
  blankRow.className = "field-row";
  let blankChoice: string | null = null;
  blankRow.append(renderImagePicker(
    ctx, "blank (solvent only)", (id) => { blankChoice = id; }, null));
  const blankButton = document.createElement("button");
  blankButton.type = "button";
  blankButton.id = "set-blank";
  blankButton.textContent = "Set blank";
  blankButton.addEventListener("click", () => {
    if (blankChoice) void ctx.actions.setBlank(blankChoice);
  });
  blankRow.append(blankButton);
  container.append(blankRow);

  const blankStatus = document.createElement("p");
  blankStatus.className = "readout";
  blankStatus.id = "blank-status";
  const blank = session?.blank_spectrum ?? null;
  if (blank && blank.wavelengths.length > 0) {
    const first = blank.wavelengths[0]!;
    const last = blank.wavelengths[blank.wavelengths.length - 1]!;
    blankStatus.append("blank set, λ ");
    for (const [i, v] of [first, last].entries()) {
      const span = document.createElement("span");
      span.className = "value";
      span.textContent = fmt(v);
      blankStatus.append(span);
      if (i === 0) blankStatus.append(" to ");
    }
    blankStatus.append(" nm");
  } else {
    blankStatus.textContent = "no blank registered";
  }
  container.append(blankStatus);

  // --- measurement ---
  const measureRow = document.createElement("div");
  measureRow.className = "field-row";
  let measureChoice: string | null = null;
  measureRow.append(renderImagePicker(
    ctx, "dye photograph", (id) => { measureChoice = id; }, null));
  const measureButton = document.createElement("button");
  measureButton.type = "button";
  measureButton.id = "measure-button";
  measureButton.textContent = "Measure";
  measureButton.addEventListener("click", () => {
    if (measureChoice) void ctx.actions.measureImage(measureChoice);
  });
  measureRow.append(measureButton);
  container.append(measureRow);

  const chartBox = document.createElement("div");
  chartBox.className = "chart-box";
  chartBox.id = "measure-chart";
  const readout = document.createElement("p");
  readout.className = "readout";
  readout.id = "measure-readout";
  readout.textContent = " ";

  const measurement = session?.measurement ?? null;
  if (measurement) {
    const markers: ChartMarker[] = [];
    if (typeof ctx.state.sampleWavelength === "number") {
      const at = measurement.wavelengths.indexOf(ctx.state.sampleWavelength);
      if (at >= 0) {
        markers.push({
          index: at,
          color: "#b8860b",
          label: "reading λ",
        });
      }
    }
    renderChart(chartBox, {
      xs: measurement.wavelengths,
      series: [{
        name: "absorbance",
        ys: measurement.absorbance,
        color: "#222222",
      }],
      xTitle: "wavelength (nm)",
      xEndLabels: [
        fmt(measurement.wavelengths[0] ?? 0),
        fmt(measurement.wavelengths[measurement.wavelengths.length - 1] ?? 0),
      ],
      yEndLabels: null,
      markers,
      ariaLabel: "absorbance spectrum; pick the reading wavelength",
      onCursor: (index) => {
        if (index === null) {
          readout.textContent = " ";
          return;
        }
        readout.textContent =
          `λ ${fmt(measurement.wavelengths[index]!)} nm, ` +
          `T ${fmt(measurement.transmittance[index]!)}, ` +
          `A ${fmt(measurement.absorbance[index]!)}, ` +
          `${measurement.flags[index]!}`;
      },
      onPick: (index) => ctx.actions.chooseWavelengthIndex(index),
    });
  } else {
    chartBox.textContent = "no measurement yet";
  }
  container.append(chartBox, readout);

  // --- sample registration ---
  const form = document.createElement("div");
  form.className = "field-row";
  const concLabel = document.createElement("label");
  concLabel.className = "field";
  concLabel.append("concentration");
  const concInput = document.createElement("input");
  concInput.type = "number";
  concInput.step = "any";
  concInput.id = "sample-concentration";
  concLabel.append(concInput);
  const nameLabel = document.createElement("label");
  nameLabel.className = "field";
  nameLabel.append("label (optional)");
  const nameInput = document.createElement("input");
  nameInput.type = "text";
  nameInput.id = "sample-label";
  nameLabel.append(nameInput);

  const modeLabel = document.createElement("label");
  modeLabel.className = "field";
  modeLabel.append("reading wavelength");
  const modeButton = document.createElement("button");
  modeButton.type = "button";
  modeButton.id = "wavelength-mode";
  if (ctx.state.sampleWavelength === "auto") {
    modeButton.textContent = "auto (peak absorbance)";
  } else {
    modeButton.textContent = "";
    const span = document.createElement("span");
    span.className = "value";
    span.textContent = fmt(ctx.state.sampleWavelength);
    modeButton.append(span, " nm — click to reset to auto");
  }
  modeButton.addEventListener("click", () =>
    ctx.actions.chooseAutoWavelength());
  modeLabel.append(modeButton);

  const addButton = document.createElement("button");
  addButton.type = "button";
  addButton.id = "add-sample";
  addButton.textContent = "Add sample";
  addButton.disabled = measurement === null;
  addButton.addEventListener("click", () =>
    void ctx.actions.addSample(concInput.value, nameInput.value));

  form.append(concLabel, nameLabel, modeLabel, addButton);
  container.append(form, samplesTable(ctx));
}
