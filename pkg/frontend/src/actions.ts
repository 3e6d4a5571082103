/** User-intent layer: every button, drag and key lands here.
 *
 * Each mutation sends If-Match with the revision the client last saw, then
 * re-reads the whole session so the mirror is exactly what the server holds.
 * Failures are routed three ways: 409 raises the stale-session banner,
 * other HTTP errors become dismissible notices carrying the service's error
 * name verbatim, and an unreachable service drops the session mirror so no
 * stale number stays on screen.
 */

import { ApiClient, ApiError, ServiceUnreachable } from "./api.js";
import type { GeometryDraft } from "./api.js";
import { clampGeometry } from "./geometry.js";
import { Store } from "./state.js";
import type { AnchorPin, Tab } from "./state.js";

export class Actions {
  constructor(
    readonly api: ApiClient,
    readonly store: Store,
  ) {}

  private handleFailure(error: unknown): void {
    if (error instanceof ServiceUnreachable) {
      this.store.update({
        serviceDown: true,
        session: null,
        lastExtract: null,
        lastPrediction: null,
      });
      this.store.pushNotice(
        "error", "service-unreachable", error.message);
    } else if (error instanceof ApiError && error.status === 409) {
      this.store.update({ staleSession: true });
    } else if (error instanceof ApiError) {
      this.store.pushNotice("error", error.code, error.detail);
    } else {
      throw error;
    }
  }

  /** Run a service call; on success refresh the session mirror. */
  private async mutate<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      const result = await call();
      await this.refreshSession();
      return result;
    } catch (error) {
      this.handleFailure(error);
      return null;
    }
  }

  async refreshSession(): Promise<void> {
    try {
      const snapshot = await this.api.getSession();
      this.store.update({
        session: snapshot.doc,
        revision: snapshot.revision,
        serviceDown: false,
        staleSession: false,
      });
    } catch (error) {
      this.handleFailure(error);
    }
  }

  async init(): Promise<void> {
    await this.refreshSession();
  }

  setTab(tab: Tab): void {
    this.store.update({ tab });
  }

  dismissNotice(id: number): void {
    this.store.dismissNotice(id);
  }

  async uploadImage(bytes: Uint8Array, filename: string): Promise<void> {
    const state = this.store.get();
    const result = await this.mutate(() =>
      this.api.uploadImage(bytes, filename, state.revision));
    if (result) {
      const dims = { width: result.width, height: result.height };
      this.store.update({
        selectedImageId: result.image_id,
        imageDims: { ...this.store.get().imageDims,
                     [result.image_id]: dims },
        geometry: clampGeometry(
          this.store.get().geometry, dims.width, dims.height),
      });
    }
  }

  selectImage(imageId: string): void {
    this.store.update({ selectedImageId: imageId });
  }

  /** Clamp-and-store a geometry edit from a drag handle or number input. */
  setGeometry(draft: GeometryDraft): void {
    const state = this.store.get();
    const dims = state.selectedImageId
      ? state.imageDims[state.selectedImageId]
      : undefined;
    const geometry = dims
      ? clampGeometry(draft, dims.width, dims.height)
      : draft;
    this.store.update({ geometry });
  }

  setSmoothWindow(window: number): void {
    const smoothWindow = Math.max(1, Math.round(window));
    this.store.update({
      smoothWindow: smoothWindow % 2 === 0 ? smoothWindow + 1 : smoothWindow,
    });
  }

  async extract(): Promise<void> {
    const state = this.store.get();
    if (!state.selectedImageId) {
      this.store.pushNotice("info", "no-image", "upload or pick an image first");
      return;
    }
    const result = await this.mutate(() =>
      this.api.extract(state.selectedImageId!, state.geometry,
                       state.smoothWindow, state.revision));
    if (result) this.store.update({ lastExtract: result });
  }

  /** A chart pick on the calibrate tab: pin the column as the next anchor. */
  placeAnchor(index: number): void {
    const state = this.store.get();
    const pixels = state.lastExtract?.pixels;
    if (!pixels || pixels[index] === undefined) return;
    const pins: [AnchorPin, AnchorPin] = [
      { ...state.pins[0] },
      { ...state.pins[1] },
    ];
    pins[state.nextPin] = {
      pixel: pixels[index]!,
      wavelengthText: pins[state.nextPin].wavelengthText,
    };
    this.store.update({
      pins,
      nextPin: state.nextPin === 0 ? 1 : 0,
    });
  }

  setPinWavelength(which: 0 | 1, text: string): void {
    const current = this.store.get().pins;
    const pins: [AnchorPin, AnchorPin] = [
      { ...current[0] },
      { ...current[1] },
    ];
    pins[which] = { ...pins[which], wavelengthText: text };
    this.store.update({ pins });
  }

  async applyCalibration(): Promise<void> {
    const state = this.store.get();
    const anchors = state.pins.map((pin) => ({
      pixel: pin.pixel,
      wavelength_nm: Number(pin.wavelengthText),
    }));
    if (anchors.some((a) => a.pixel === null || !Number.isFinite(a.wavelength_nm))) {
      this.store.pushNotice(
        "info", "incomplete-anchors",
        "pick two points on the chart and give each a wavelength");
      return;
    }
    await this.mutate(() =>
      this.api.putCalibration(
        anchors as { pixel: number; wavelength_nm: number }[],
        state.revision));
  }

  async setBlank(imageId: string): Promise<void> {
    const state = this.store.get();
    await this.mutate(() =>
      this.api.putBlank(imageId, state.smoothWindow, state.revision));
  }

  async measureImage(imageId: string): Promise<void> {
    const state = this.store.get();
    await this.mutate(() =>
      this.api.measure(imageId, state.smoothWindow, state.revision));
  }

  /** A chart pick on the measure tab: read the sample at this wavelength. */
  chooseWavelengthIndex(index: number): void {
    const measurement = this.store.get().session?.measurement;
    const wavelength = measurement?.wavelengths[index];
    if (wavelength !== undefined) {
      this.store.update({ sampleWavelength: wavelength });
    }
  }

  chooseAutoWavelength(): void {
    this.store.update({ sampleWavelength: "auto" });
  }

  async addSample(concentrationText: string, label: string): Promise<void> {
    const concentration = Number(concentrationText);
    if (!Number.isFinite(concentration)) {
      this.store.pushNotice(
        "info", "invalid-value", "concentration must be a number");
      return;
    }
    const state = this.store.get();
    await this.mutate(() =>
      this.api.addSample(
        {
          concentration,
          wavelength: state.sampleWavelength,
          label,
        },
        state.revision,
      ));
  }

  async removeSample(index: number): Promise<void> {
    const state = this.store.get();
    await this.mutate(() => this.api.deleteSample(index, state.revision));
  }

  setFitMode(mode: string): void {
    this.store.update({ fitMode: mode });
  }

  async runFit(): Promise<void> {
    const state = this.store.get();
    await this.mutate(() => this.api.fit(state.fitMode, state.revision));
  }

  async predictFromAbsorbance(text: string): Promise<void> {
    const absorbance = Number(text);
    if (!Number.isFinite(absorbance)) {
      this.store.pushNotice(
        "info", "invalid-value", "absorbance must be a number");
      return;
    }
    try {
      const result = await this.api.predict({ absorbance });
      this.store.update({ lastPrediction: result });
    } catch (error) {
      this.handleFailure(error);
    }
  }

  async predictFromImage(imageId: string): Promise<void> {
    const smooth = this.store.get().smoothWindow;
    try {
      const result = await this.api.predict({ image_id: imageId, smooth });
      this.store.update({ lastPrediction: result });
    } catch (error) {
      this.handleFailure(error);
    }
  }

  /** The 409 recovery path: take the server's session and carry on. */
  async reloadSession(): Promise<void> {
    await this.refreshSession();
  }
}
