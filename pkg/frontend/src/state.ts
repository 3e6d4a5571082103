/** Application state: a mirror of the service session plus view bookkeeping.
 *
 * The session mirror is only ever replaced wholesale with what
 * GET /api/session returned; no field of it is computed on the client. When
 * the service cannot be reached the mirror is dropped entirely — displayed
 * values must disappear rather than go stale.
 */

import type {
  ExtractResult,
  GeometryDraft,
  PredictResult,
  SessionDoc,
} from "./api.js";

export type Tab = "capture" | "calibrate" | "measure" | "fit";

export interface Notice {
  id: number;
  kind: "error" | "info";
  code: string;
  detail: string;
}

export interface AnchorPin {
  pixel: number | null;
  wavelengthText: string;
}

export interface AppState {
  tab: Tab;
  session: SessionDoc | null;
  revision: number | null;
  /** set by a 409: the server moved on; offer a session reload */
  staleSession: boolean;
  /** set when fetch itself failed: the service is gone */
  serviceDown: boolean;
  notices: Notice[];
  selectedImageId: string | null;
  /** width/height by image id, remembered from upload responses */
  imageDims: Record<string, { width: number; height: number }>;
  geometry: GeometryDraft;
  smoothWindow: number;
  lastExtract: ExtractResult | null;
  pins: [AnchorPin, AnchorPin];
  /** which pin the next chart pick fills */
  nextPin: 0 | 1;
  sampleWavelength: number | "auto";
  lastPrediction: PredictResult | null;
  fitMode: string;
}

export function initialState(): AppState {
  return {
    tab: "capture",
    session: null,
    revision: null,
    staleSession: false,
    serviceDown: false,
    notices: [],
    selectedImageId: null,
    imageDims: {},
    geometry: { row: 0, band_half_width: 0, col_start: 0, col_end: 0 },
    smoothWindow: 1,
    lastExtract: null,
    pins: [
      { pixel: null, wavelengthText: "" },
      { pixel: null, wavelengthText: "" },
    ],
    nextPin: 0,
    sampleWavelength: "auto",
    lastPrediction: null,
    fitMode: "with-intercept",
  };
}

export type Listener = (state: AppState) => void;

export class Store {
  private state: AppState = initialState();
  private listeners: Listener[] = [];
  private nextNoticeId = 1;

  get(): AppState {
    return this.state;
  }

  update(change: Partial<AppState>): void {
    this.state = { ...this.state, ...change };
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  pushNotice(kind: Notice["kind"], code: string, detail: string): void {
    const notice = { id: this.nextNoticeId++, kind, code, detail };
    this.update({ notices: [...this.state.notices, notice] });
  }

  dismissNotice(id: number): void {
    this.update({ notices: this.state.notices.filter((n) => n.id !== id) });
  }
}

/** The wavelength the service assigned to a spectrum column, if it has told
 * us one: the blank and measurement tables carry per-column wavelengths for
 * the current geometry. Returns null when no service-provided value exists —
 * callers show the pixel instead, never a locally computed wavelength. */
export function wavelengthForIndex(
  session: SessionDoc | null,
  index: number,
): number | null {
  const table = session?.blank_spectrum ?? session?.measurement;
  if (!table) return null;
  const value = table.wavelengths[index];
  return value === undefined ? null : value;
}
