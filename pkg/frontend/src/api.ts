/** Typed HTTP client for the measurement service.
 *
 * Every number the app displays enters through this module, straight from a
 * service response; nothing here computes spectra, calibrations or fits.
 * Non-finite cells arrive as the strings "NaN"/"Infinity"/"-Infinity" and
 * are revived field-by-field (never by blind string matching, so labels and
 * filenames are safe).
 */

import { cellToNumber, cellsToNumbers } from "./format.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
    readonly revision?: number,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super("the measurement service did not respond");
    this.name = "ServiceUnreachable";
    this.cause = cause;
  }
}

export interface GeometryDraft {
  row: number;
  band_half_width: number;
  col_start: number;
  col_end: number;
}

export interface UploadResult {
  image_id: string;
  width: number;
  height: number;
  revision: number;
}

export interface ExtractResult {
  pixels: number[];
  r: number[];
  g: number[];
  b: number[];
  combined: number[];
  image_id: string;
  revision: number;
}

export interface CalibrationResult {
  p1: number;
  lambda1: number;
  p2: number;
  lambda2: number;
  slope_nm_per_px: number;
  intercept_nm: number;
  revision: number;
}

export interface MeasurementResult {
  wavelengths: number[];
  transmittance: number[];
  absorbance: number[];
  flags: string[];
  image_id: string;
  revision: number;
}

export interface SampleRow {
  concentration: number;
  absorbance: number;
  label: string;
  image_id: string | null;
  wavelength_nm: number | null;
}

export interface FitResult {
  slope: number;
  intercept: number;
  r_squared: number;
  n_samples: number;
  analysis_wavelength_nm: number | null;
  mode: string;
  revision: number;
}

export interface PredictResult {
  concentration: number;
  below_range: boolean;
  absorbance: number;
  revision: number;
}

/** The session document as the service persists and serves it. */
export interface SessionDoc {
  schema_version: number;
  created: string;
  modified: string;
  images: Record<string, { digest: string; filename: string }>;
  geometry: (GeometryDraft & { orientation: string }) | null;
  raw_spectrum: {
    r: number[];
    g: number[];
    b: number[];
    image_id: string | null;
  } | null;
  wavelength_cal: {
    p1: number;
    lambda1: number;
    p2: number;
    lambda2: number;
  } | null;
  blank_spectrum: {
    wavelengths: number[];
    r: number[];
    g: number[];
    b: number[];
    combined: number[];
  } | null;
  measurement: {
    wavelengths: number[];
    transmittance: number[];
    absorbance: number[];
    flags: string[];
    image_id: string | null;
  } | null;
  samples: SampleRow[];
  fit: {
    slope: number;
    intercept: number;
    r_squared: number;
    n_samples: number;
    analysis_wavelength_nm: number | null;
    mode: string;
  } | null;
}

export interface SessionSnapshot {
  doc: SessionDoc;
  text: string;
  revision: number;
}

function nullableCell(cell: unknown): number | null {
  return cell === null || cell === undefined ? null : cellToNumber(cell);
}

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new TypeError(`expected ${what} to be an object`);
  }
  return value as Record<string, unknown>;
}

function parseSample(value: unknown): SampleRow {
  const raw = asRecord(value, "a sample");
  return {
    concentration: cellToNumber(raw.concentration),
    absorbance: cellToNumber(raw.absorbance),
    label: String(raw.label ?? ""),
    image_id: raw.image_id === null ? null : String(raw.image_id),
    wavelength_nm: nullableCell(raw.wavelength_nm),
  };
}

function parseFit(value: unknown): SessionDoc["fit"] {
  if (value === null || value === undefined) return null;
  const raw = asRecord(value, "the fit");
  return {
    slope: cellToNumber(raw.slope),
    intercept: cellToNumber(raw.intercept),
    r_squared: cellToNumber(raw.r_squared),
    n_samples: Number(raw.n_samples),
    analysis_wavelength_nm: nullableCell(raw.analysis_wavelength_nm),
    mode: String(raw.mode),
  };
}

function parseMeasurement(value: unknown): SessionDoc["measurement"] {
  if (value === null || value === undefined) return null;
  const raw = asRecord(value, "the measurement");
  return {
    wavelengths: cellsToNumbers(raw.wavelengths),
    transmittance: cellsToNumbers(raw.transmittance),
    absorbance: cellsToNumbers(raw.absorbance),
    flags: (raw.flags as unknown[]).map(String),
    image_id: raw.image_id === null || raw.image_id === undefined
      ? null : String(raw.image_id),
  };
}

export function parseSessionDoc(text: string): SessionDoc {
  const raw = asRecord(JSON.parse(text), "the session document");
  const images: SessionDoc["images"] = {};
  for (const [id, entry] of Object.entries(asRecord(raw.images, "images"))) {
    const e = asRecord(entry, `image ${id}`);
    images[id] = { digest: String(e.digest), filename: String(e.filename) };
  }
  const geometry = raw.geometry === null ? null : (() => {
    const g = asRecord(raw.geometry, "geometry");
    return {
      row: Number(g.row),
      band_half_width: Number(g.band_half_width),
      col_start: Number(g.col_start),
      col_end: Number(g.col_end),
      orientation: String(g.orientation),
    };
  })();
  const rawSpectrum = raw.raw_spectrum === null ? null : (() => {
    const s = asRecord(raw.raw_spectrum, "raw_spectrum");
    return {
      r: cellsToNumbers(s.r),
      g: cellsToNumbers(s.g),
      b: cellsToNumbers(s.b),
      image_id: s.image_id === null ? null : String(s.image_id),
    };
  })();
  const cal = raw.wavelength_cal === null ? null : (() => {
    const c = asRecord(raw.wavelength_cal, "wavelength_cal");
    return {
      p1: cellToNumber(c.p1),
      lambda1: cellToNumber(c.lambda1),
      p2: cellToNumber(c.p2),
      lambda2: cellToNumber(c.lambda2),
    };
  })();
  const blank = raw.blank_spectrum === null ? null : (() => {
    const b = asRecord(raw.blank_spectrum, "blank_spectrum");
    return {
      wavelengths: cellsToNumbers(b.wavelengths),
      r: cellsToNumbers(b.r),
      g: cellsToNumbers(b.g),
      b: cellsToNumbers(b.b),
      combined: cellsToNumbers(b.combined),
    };
  })();
  return {
    schema_version: Number(raw.schema_version),
    created: String(raw.created),
    modified: String(raw.modified),
    images,
    geometry,
    raw_spectrum: rawSpectrum,
    wavelength_cal: cal,
    blank_spectrum: blank,
    measurement: parseMeasurement(raw.measurement),
    samples: (raw.samples as unknown[]).map(parseSample),
    fit: parseFit(raw.fit),
  };
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  url(path: string): string {
    return `${this.base}${path}`;
  }

  thumbnailUrl(imageId: string): string {
    return this.url(`/api/images/${imageId}/thumbnail`);
  }

  exportUrl(artifact: string): string {
    return this.url(`/api/export/${artifact}`);
  }

  private async request(
    path: string,
    init: RequestInit,
    revision?: number | null,
  ): Promise<Response> {
    const headers = new Headers(init.headers);
    if (revision !== null && revision !== undefined) {
      headers.set("If-Match", `"${revision}"`);
    }
    let response: Response;
    try {
      response = await fetch(this.url(path), { ...init, headers });
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    if (!response.ok) {
      let code = "http-error";
      let detail = response.statusText;
      let revisionEcho: number | undefined;
      try {
        const body = await response.json();
        code = String(body.error ?? code);
        detail = String(body.detail ?? detail);
        if (typeof body.revision === "number") revisionEcho = body.revision;
      } catch {
        // non-JSON error body: keep the generic code
      }
      throw new ApiError(response.status, code, detail, revisionEcho);
    }
    return response;
  }

  private async requestJson(
    path: string,
    init: RequestInit,
    revision?: number | null,
  ): Promise<Record<string, unknown>> {
    const response = await this.request(path, init, revision);
    return asRecord(await response.json(), "the response body");
  }

  async uploadImage(
    bytes: Uint8Array,
    filename: string,
    revision?: number | null,
  ): Promise<UploadResult> {
    const raw = await this.requestJson(
      `/api/images?filename=${encodeURIComponent(filename)}`,
      {
        method: "POST",
        body: new Uint8Array(bytes) as unknown as BodyInit,
        headers: { "Content-Type": "application/octet-stream" },
      },
      revision,
    );
    return {
      image_id: String(raw.image_id),
      width: Number(raw.width),
      height: Number(raw.height),
      revision: Number(raw.revision),
    };
  }

  async extract(
    imageId: string,
    geometry: GeometryDraft,
    smoothWindow: number,
    revision?: number | null,
  ): Promise<ExtractResult> {
    const raw = await this.requestJson(
      "/api/spectra/extract",
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          image_id: imageId,
          geometry,
          smooth: smoothWindow,
        }),
      },
      revision,
    );
    return {
      pixels: cellsToNumbers(raw.pixels),
      r: cellsToNumbers(raw.r),
      g: cellsToNumbers(raw.g),
      b: cellsToNumbers(raw.b),
      combined: cellsToNumbers(raw.combined),
      image_id: String(raw.image_id),
      revision: Number(raw.revision),
    };
  }

  async putCalibration(
    anchors: { pixel: number; wavelength_nm: number }[],
    revision?: number | null,
  ): Promise<CalibrationResult> {
    const raw = await this.requestJson(
      "/api/calibration",
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ anchors }),
      },
      revision,
    );
    return {
      p1: cellToNumber(raw.p1),
      lambda1: cellToNumber(raw.lambda1),
      p2: cellToNumber(raw.p2),
      lambda2: cellToNumber(raw.lambda2),
      slope_nm_per_px: cellToNumber(raw.slope_nm_per_px),
      intercept_nm: cellToNumber(raw.intercept_nm),
      revision: Number(raw.revision),
    };
  }

  private parseMeasurementResult(
    raw: Record<string, unknown>,
  ): MeasurementResult {
    return {
      wavelengths: cellsToNumbers(raw.wavelengths),
      transmittance: cellsToNumbers(raw.transmittance),
      absorbance: cellsToNumbers(raw.absorbance),
      flags: (raw.flags as unknown[]).map(String),
      image_id: String(raw.image_id),
      revision: Number(raw.revision),
    };
  }

  async putBlank(
    imageId: string,
    smoothWindow: number,
    revision?: number | null,
  ): Promise<MeasurementResult> {
    const raw = await this.requestJson(
      "/api/blank",
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ image_id: imageId, smooth: smoothWindow }),
      },
      revision,
    );
    return this.parseMeasurementResult(raw);
  }

  async measure(
    imageId: string,
    smoothWindow: number,
    revision?: number | null,
  ): Promise<MeasurementResult> {
    const raw = await this.requestJson(
      "/api/measure",
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ image_id: imageId, smooth: smoothWindow }),
      },
      revision,
    );
    return this.parseMeasurementResult(raw);
  }

  async addSample(
    body: {
      concentration: number;
      wavelength: number | "auto";
      label?: string;
    },
    revision?: number | null,
  ): Promise<{ samples: SampleRow[]; revision: number }> {
    const raw = await this.requestJson(
      "/api/samples",
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
      revision,
    );
    return {
      samples: (raw.samples as unknown[]).map(parseSample),
      revision: Number(raw.revision),
    };
  }

  async deleteSample(
    index: number,
    revision?: number | null,
  ): Promise<{ samples: SampleRow[]; revision: number }> {
    const raw = await this.requestJson(
      `/api/samples/${index}`,
      { method: "DELETE" },
      revision,
    );
    return {
      samples: (raw.samples as unknown[]).map(parseSample),
      revision: Number(raw.revision),
    };
  }

  async fit(mode: string, revision?: number | null): Promise<FitResult> {
    const raw = await this.requestJson(
      "/api/fit",
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ mode }),
      },
      revision,
    );
    return {
      slope: cellToNumber(raw.slope),
      intercept: cellToNumber(raw.intercept),
      r_squared: cellToNumber(raw.r_squared),
      n_samples: Number(raw.n_samples),
      analysis_wavelength_nm: nullableCell(raw.analysis_wavelength_nm),
      mode: String(raw.mode),
      revision: Number(raw.revision),
    };
  }

  async predict(
    body: { absorbance: number } | { image_id: string; smooth?: number },
  ): Promise<PredictResult> {
    const raw = await this.requestJson("/api/predict", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return {
      concentration: cellToNumber(raw.concentration),
      below_range: Boolean(raw.below_range),
      absorbance: cellToNumber(raw.absorbance),
      revision: Number(raw.revision),
    };
  }

  async getSession(): Promise<SessionSnapshot> {
    const response = await this.request("/api/session", { method: "GET" });
    const text = await response.text();
    const etag = response.headers.get("etag") ?? '"0"';
    return {
      doc: parseSessionDoc(text),
      text,
      revision: Number(etag.replace(/"/g, "")),
    };
  }

  async putSession(
    text: string,
    revision?: number | null,
  ): Promise<{ revision: number }> {
    const raw = await this.requestJson(
      "/api/session",
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: text,
      },
      revision,
    );
    return { revision: Number(raw.revision) };
  }
}
