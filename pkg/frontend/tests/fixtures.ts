/** Canned service payloads for tests that mock the network. */

export function emptySessionDoc(): Record<string, unknown> {
  return {
    blank_spectrum: null,
    created: "2026-01-01T00:00:00Z",
    fit: null,
    geometry: null,
    images: {},
    measurement: null,
    modified: "2026-01-01T00:00:00Z",
    raw_spectrum: null,
    samples: [],
    schema_version: 1,
    wavelength_cal: null,
  };
}

export interface RichOptions {
  calibrated?: boolean;
  withFit?: boolean;
  samples?: number;
}

/** A small but complete session: one image, five spectrum points. */
export function richSessionDoc(opts: RichOptions = {}): Record<string, unknown> {
  const { calibrated = true, withFit = true, samples = 3 } = opts;
  const wavelengths = [400.0, 450.0, 500.0, 550.0, 600.0];
  const doc = emptySessionDoc();
  doc.images = {
    abc123abc123: { digest: "sha256:" + "0".repeat(64), filename: "blank.png" },
  };
  doc.geometry = {
    band_half_width: 2,
    col_end: 4,
    col_start: 0,
    orientation: "left-to-right",
    row: 7,
  };
  doc.raw_spectrum = {
    b: [0.5, 0.6, 0.7, 0.6, 0.5],
    g: [0.5, 0.6, 0.7, 0.6, 0.5],
    image_id: "abc123abc123",
    r: [0.5, 0.6, 0.7, 0.6, 0.5],
  };
  if (calibrated) {
    doc.wavelength_cal = {
      lambda1: 400.0, lambda2: 600.0, p1: 0.0, p2: 4.0,
    };
    doc.blank_spectrum = {
      b: [0.5, 0.6, 0.7, 0.6, 0.5],
      combined: [0.5, 0.6, 0.7, 0.6, 0.5],
      g: [0.5, 0.6, 0.7, 0.6, 0.5],
      r: [0.5, 0.6, 0.7, 0.6, 0.5],
      wavelengths,
    };
    doc.measurement = {
      absorbance: [0.1, 0.2, "NaN", 0.4, 0.3],
      flags: ["ok", "ok", "floored", "ok", "ok"],
      image_id: "abc123abc123",
      transmittance: [0.79, 0.63, 0.01, 0.4, 0.5],
      wavelengths,
    };
  }
  doc.samples = Array.from({ length: samples }, (_, i) => ({
    absorbance: 0.125 * (i + 1),
    concentration: 0.25 * (i + 1),
    image_id: "abc123abc123",
    label: `dilution ${i + 1}`,
    wavelength_nm: 550.0,
  }));
  if (withFit && samples >= 2) {
    doc.fit = {
      analysis_wavelength_nm: 550.0,
      intercept: 0.015625,
      mode: "with-intercept",
      n_samples: samples,
      r_squared: 0.998046875,
      slope: 0.5,
    };
  }
  return doc;
}

export type Route = (
  url: string,
  init: RequestInit | undefined,
) => { status: number; body?: unknown; headers?: Record<string, string> } | null;

/** A fetch stub built from route functions; first non-null answer wins. */
export function fakeFetch(routes: Route[]): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    for (const route of routes) {
      const answer = route(url, init);
      if (answer) {
        return new Response(
          answer.body === undefined ? null : JSON.stringify(answer.body),
          {
            status: answer.status,
            headers: {
              "Content-Type": "application/json",
              ...answer.headers,
            },
          },
        );
      }
    }
    throw new Error(`no fake route for ${url}`);
  }) as typeof fetch;
}

export function sessionRoute(
  doc: Record<string, unknown>,
  revision = 0,
): Route {
  return (url, init) => {
    if (url.endsWith("/api/session") && (init?.method ?? "GET") === "GET") {
      return {
        status: 200,
        body: doc,
        headers: { ETag: `"${revision}"` },
      };
    }
    return null;
  };
}

export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
