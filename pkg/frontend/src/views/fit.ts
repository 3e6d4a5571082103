/** Fit tab: the calibration line over the collected samples, mode choice,
 * concentration prediction, and file exports. The chart is the service's
 * own rendering, fetched as SVG, so even the plotted line is server-drawn. */

import { fmt, fmtOr, NO_VALUE } from "../format.js";
import { renderImagePicker } from "./capture.js";
import type { ViewContext } from "./context.js";

const EXPORTS = [
  "raw.csv",
  "blank.csv",
  "measurement.csv",
  "fit.txt",
  "spectrum.svg",
  "measurement.svg",
  "calibration.svg",
];

export function renderFit(container: HTMLElement, ctx: ViewContext): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Fit";
  container.append(heading);

  const session = ctx.state.session;
  const samples = session?.samples ?? [];
  const fit = session?.fit ?? null;

  // --- mode + run ---
  const modeRow = document.createElement("div");
  modeRow.className = "field-row";
  modeRow.setAttribute("role", "radiogroup");
  modeRow.setAttribute("aria-label", "fit mode");
  for (const mode of ["with-intercept", "through-origin"]) {
    const label = document.createElement("label");
    label.className = "field-inline";
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "fit-mode";
    radio.value = mode;
    radio.checked = ctx.state.fitMode === mode;
    radio.addEventListener("change", () => {
      if (radio.checked) ctx.actions.setFitMode(mode);
    });
    label.append(radio, mode);
    modeRow.append(label);
  }
  const fitButton = document.createElement("button");
  fitButton.type = "button";
  fitButton.id = "fit-button";
  fitButton.textContent = "Fit calibration line";
  fitButton.disabled = samples.length < 2;
  fitButton.addEventListener("click", () => void ctx.actions.runFit());
  modeRow.append(fitButton);
  container.append(modeRow);

  if (samples.length < 2) {
    const hint = document.createElement("p");
    hint.id = "fit-requirement";
    hint.textContent =
      `a calibration line needs at least 2 samples (n ≥ 2); ` +
      `the session has ${samples.length}`;
    container.append(hint);
  }

  // --- fit record ---
  const panel = document.createElement("dl");
  panel.className = "record-panel";
  panel.id = "fit-panel";
  const entries: [string, string, string][] = fit
    ? [
        ["slope", fmt(fit.slope), "slope"],
        ["intercept", fmt(fit.intercept), "intercept"],
        ["r²", fmt(fit.r_squared), "r_squared"],
        ["samples", fmt(fit.n_samples), "n_samples"],
        ["analysis λ (nm)", fmtOr(fit.analysis_wavelength_nm),
         "analysis_wavelength_nm"],
        ["mode", fit.mode, "mode"],
      ]
    : [["fit", NO_VALUE, "fit"]];
  for (const [term, value, key] of entries) {
    const dt = document.createElement("dt");
    dt.textContent = term;
    const dd = document.createElement("dd");
    dd.className = "value";
    dd.dataset.value = key;
    dd.textContent = value;
    panel.append(dt, dd);
  }
  container.append(panel);

  // --- the calibration-line chart, drawn by the service ---
  const chartBox = document.createElement("div");
  chartBox.className = "chart-box";
  chartBox.id = "fit-chart";
  if (fit) {
    const img = document.createElement("img");
    img.alt = "calibration line over samples, drawn by the service";
    img.src = ctx.api.exportUrl("calibration.svg") +
      `?revision=${ctx.state.revision ?? 0}`;
    chartBox.append(img);
  } else {
    chartBox.textContent = "no fitted line yet";
  }
  container.append(chartBox);

  // --- prediction ---
  const predictRow = document.createElement("div");
  predictRow.className = "field-row";
  const absLabel = document.createElement("label");
  absLabel.className = "field";
  absLabel.append("absorbance");
  const absInput = document.createElement("input");
  absInput.type = "number";
  absInput.step = "any";
  absInput.id = "predict-absorbance";
  absLabel.append(absInput);
  const absButton = document.createElement("button");
  absButton.type = "button";
  absButton.id = "predict-from-absorbance";
  absButton.textContent = "Predict from absorbance";
  absButton.addEventListener("click", () =>
    void ctx.actions.predictFromAbsorbance(absInput.value));
  predictRow.append(absLabel, absButton);

  let predictImage: string | null = null;
  predictRow.append(renderImagePicker(
    ctx, "or a photograph", (id) => { predictImage = id; }, null));
  const imgButton = document.createElement("button");
  imgButton.type = "button";
  imgButton.id = "predict-from-image";
  imgButton.textContent = "Predict from image";
  imgButton.addEventListener("click", () => {
    if (predictImage) void ctx.actions.predictFromImage(predictImage);
  });
  predictRow.append(imgButton);
  container.append(predictRow);

  const result = document.createElement("p");
  result.className = "readout";
  result.id = "prediction-result";
  const prediction = ctx.state.lastPrediction;
  if (prediction) {
    result.append("concentration ");
    const value = document.createElement("span");
    value.className = "value";
    value.dataset.value = "predicted-concentration";
    value.textContent = fmt(prediction.concentration);
    result.append(value);
    result.append(" at absorbance ");
    const abs = document.createElement("span");
    abs.className = "value";
    abs.textContent = fmt(prediction.absorbance);
    result.append(abs);
    if (prediction.below_range) {
      const badge = document.createElement("strong");
      badge.className = "badge-below-range";
      badge.textContent = "below calibrated range";
      result.append(" ", badge);
    }
  } else {
    result.textContent = "no prediction yet";
  }
  container.append(result);

  // --- exports ---
  const exports = document.createElement("p");
  exports.id = "export-links";
  exports.append("download: ");
  for (const name of EXPORTS) {
    const a = document.createElement("a");
    a.href = ctx.api.exportUrl(name);
    a.download = name;
    a.textContent = name;
    exports.append(a, " ");
  }
  container.append(exports);
}
