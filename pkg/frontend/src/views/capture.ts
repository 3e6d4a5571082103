/** Capture tab: bring a photograph in, place the extraction band on it,
 * and watch the raw spectrum the service reads out of that band. */

import { renderChart } from "../charts.js";
import { fmt } from "../format.js";
import { clampGeometry } from "../geometry.js";
import type { ViewContext } from "./context.js";

const CHANNEL_COLORS: Record<string, string> = {
  r: "#c43d3d",
  g: "#3d9e3d",
  b: "#3d5dc4",
  combined: "#222222",
};

function imageChoices(ctx: ViewContext): [string, string][] {
  const images = ctx.state.session?.images ?? {};
  return Object.entries(images).map(
    ([id, entry]) => [id, `${entry.filename} (${id})`]);
}

export function renderImagePicker(
  ctx: ViewContext,
  label: string,
  onChoose: (id: string) => void,
  selected: string | null,
): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.append(label);
  const select = document.createElement("select");
  select.className = "image-picker";
  const blank = document.createElement("option");
  blank.value = "";
  blank.textContent = "choose an image";
  select.append(blank);
  for (const [id, text] of imageChoices(ctx)) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = text;
    if (id === selected) option.selected = true;
    select.append(option);
  }
  select.addEventListener("change", () => {
    if (select.value) onChoose(select.value);
  });
  wrap.append(select);
  return wrap;
}

function geometryField(
  name: string,
  key: "row" | "band_half_width" | "col_start" | "col_end",
  ctx: ViewContext,
): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.append(name);
  const input = document.createElement("input");
  input.type = "number";
  input.step = "1";
  input.value = String(ctx.state.geometry[key]);
  input.dataset.geometry = key;
  input.addEventListener("change", () => {
    ctx.actions.setGeometry({
      ...ctx.actions.store.get().geometry,
      [key]: Number(input.value),
    });
  });
  wrap.append(input);
  return wrap;
}

/** Pointer-draggable band overlay across the thumbnail. The drag writes
 * image-pixel geometry through the same clamped path as the inputs, and the
 * extract request fires on release — never mid-drag, never out of bounds. */
function bandOverlay(ctx: ViewContext, dims: { width: number; height: number },
                     img: HTMLImageElement): HTMLElement {
  const overlay = document.createElement("div");
  overlay.className = "band-overlay";
  const band = document.createElement("div");
  band.className = "band-rect";
  band.tabIndex = 0;
  band.setAttribute("role", "slider");
  band.setAttribute("aria-label",
    "extraction band; arrows move the row, shift+arrows resize");
  overlay.append(band);

  const g = ctx.state.geometry;
  const pct = (v: number, total: number) => `${(v / total) * 100}%`;
  band.style.top = pct(g.row - g.band_half_width, dims.height);
  band.style.height = pct(2 * g.band_half_width + 1, dims.height);
  band.style.left = pct(g.col_start, dims.width);
  band.style.width = pct(g.col_end - g.col_start + 1, dims.width);

  let dragging = false;
  let startY = 0;
  let startRow = g.row;
  band.addEventListener("pointerdown", (event) => {
    dragging = true;
    startY = event.clientY;
    startRow = ctx.actions.store.get().geometry.row;
    band.setPointerCapture(event.pointerId);
  });
  band.addEventListener("pointermove", (event) => {
    if (!dragging) return;
    const rect = overlay.getBoundingClientRect();
    if (rect.height === 0) return;
    const deltaRows = ((event.clientY - startY) / rect.height) * dims.height;
    ctx.actions.setGeometry({
      ...ctx.actions.store.get().geometry,
      row: startRow + deltaRows,
    });
  });
  band.addEventListener("pointerup", () => {
    if (!dragging) return;
    dragging = false;
    void ctx.actions.extract();
  });
  band.addEventListener("keydown", (event) => {
    const current = ctx.actions.store.get().geometry;
    let next = { ...current };
    if (event.key === "ArrowUp" || event.key === "ArrowDown") {
      const step = event.key === "ArrowUp" ? -1 : 1;
      if (event.shiftKey) next.band_half_width += step;
      else next.row += step;
    } else if (event.key === "Enter") {
      void ctx.actions.extract();
      return;
    } else {
      return;
    }
    event.preventDefault();
    ctx.actions.setGeometry(clampGeometry(next, dims.width, dims.height));
  });
  return overlay;
}

export function renderCapture(container: HTMLElement, ctx: ViewContext): void {
  container.textContent = "";
  const heading = document.createElement("h2");
  heading.textContent = "Capture";
  container.append(heading);

  const uploadLabel = document.createElement("label");
  uploadLabel.className = "field";
  uploadLabel.append("photograph (PNG or JPEG)");
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.accept = "image/png,image/jpeg";
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    void file.arrayBuffer().then((buffer) =>
      ctx.actions.uploadImage(new Uint8Array(buffer), file.name));
  });
  uploadLabel.append(fileInput);
  container.append(uploadLabel);

  container.append(renderImagePicker(
    ctx, "stored images", (id) => ctx.actions.selectImage(id),
    ctx.state.selectedImageId));

  const selected = ctx.state.selectedImageId;
  if (selected) {
    const figure = document.createElement("figure");
    figure.className = "photo-frame";
    const img = document.createElement("img");
    img.alt = `photograph ${ctx.state.session?.images[selected]?.filename ?? selected}`;
    img.src = ctx.api.thumbnailUrl(selected);
    figure.append(img);
    const dims = ctx.state.imageDims[selected];
    if (dims) figure.append(bandOverlay(ctx, dims, img));
    container.append(figure);
  }

  const controls = document.createElement("div");
  controls.className = "field-row";
  controls.append(
    geometryField("row", "row", ctx),
    geometryField("band half-width", "band_half_width", ctx),
    geometryField("first column", "col_start", ctx),
    geometryField("last column", "col_end", ctx),
  );
  const smoothLabel = document.createElement("label");
  smoothLabel.className = "field";
  smoothLabel.append("smoothing window");
  const smoothInput = document.createElement("input");
  smoothInput.type = "number";
  smoothInput.step = "2";
  smoothInput.min = "1";
  smoothInput.value = String(ctx.state.smoothWindow);
  smoothInput.addEventListener("change", () => {
    ctx.actions.setSmoothWindow(Number(smoothInput.value));
  });
  smoothLabel.append(smoothInput);
  controls.append(smoothLabel);
  container.append(controls);

  const extractButton = document.createElement("button");
  extractButton.type = "button";
  extractButton.id = "extract-button";
  extractButton.textContent = "Extract spectrum";
  extractButton.disabled = !selected;
  extractButton.addEventListener("click", () => void ctx.actions.extract());
  container.append(extractButton);

  const chartBox = document.createElement("div");
  chartBox.className = "chart-box";
  chartBox.id = "capture-chart";
  const readout = document.createElement("p");
  readout.className = "readout";
  readout.id = "capture-readout";
  readout.textContent = " ";

  const extract = ctx.state.lastExtract;
  if (extract) {
    renderChart(chartBox, {
      xs: extract.pixels,
      series: (["r", "g", "b", "combined"] as const).map((name) => ({
        name,
        ys: extract[name],
        color: CHANNEL_COLORS[name]!,
      })),
      xTitle: "pixel (column)",
      xEndLabels: [
        fmt(extract.pixels[0] ?? 0),
        fmt(extract.pixels[extract.pixels.length - 1] ?? 0),
      ],
      yEndLabels: null,
      ariaLabel: "raw spectrum by channel",
      onCursor: (index) => {
        if (index === null) {
          readout.textContent = " ";
          return;
        }
        readout.textContent =
          `pixel ${fmt(extract.pixels[index]!)}: ` +
          `combined ${fmt(extract.combined[index]!)}`;
      },
    });
  } else {
    chartBox.textContent = "no spectrum extracted yet";
  }
  container.append(chartBox, readout);
}
