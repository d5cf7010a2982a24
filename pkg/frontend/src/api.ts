/**
 * HTTP client for the surface-fixtures service.
 *
 * Binary payloads are little-endian typed arrays concatenated in request
 * order: pos float32 xyz, color uint8 rgb, normal float32 xyz, label int32.
 * Scalar/vector fixture payloads are float64 (NaN where undefined).
 */

export interface SessionInfo {
  sessionId: string;
  nPoints: number;
  h: number;
}

export interface PointData {
  version: number;
  pos?: Float32Array;
  color?: Uint8Array;
  normal?: Float32Array;
  label?: Int32Array;
}

export interface SolveResult {
  fixtureId: string;
  undefinedCount: number;
  cached: boolean;
  solveMs: number;
  scalarMin: number | null;
  scalarMax: number | null;
}

export interface QueryResult {
  region: number;
  footpoint: [number, number, number];
  defined: boolean;
  value: number | null;
  direction: [number, number, number] | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function expectOk(res: Response): Promise<Response> {
  if (res.ok) return res;
  let code = "http_error";
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body?.detail) {
      code = body.detail.code ?? code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, code, message);
}

export type PointField = "pos" | "color" | "normal" | "label";

export class FixtureClient {
  constructor(private baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  async createSession(ply: Uint8Array | string): Promise<SessionInfo> {
    const bytes = typeof ply === "string" ? new TextEncoder().encode(ply) : ply;
    // copy into a plain ArrayBuffer so the fetch body type is unambiguous
    const body = bytes.buffer.slice(
      bytes.byteOffset,
      bytes.byteOffset + bytes.byteLength,
    ) as ArrayBuffer;
    const res = await expectOk(
      await fetch(`${this.baseUrl}/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/octet-stream" },
        body,
      }),
    );
    const json = await res.json();
    return { sessionId: json.session_id, nPoints: json.n_points, h: json.h };
  }

  /** Fetch per-point arrays; fields are sliced out of one binary payload. */
  async getPoints(sessionId: string, fields: PointField[]): Promise<PointData> {
    const res = await expectOk(
      await fetch(
        `${this.baseUrl}/sessions/${sessionId}/points?fields=${fields.join(",")}`,
      ),
    );
    const version = Number(res.headers.get("X-Version") ?? "0");
    const buf = await res.arrayBuffer();

    // payload holds nPoints of each field; byte sizes per point:
    const bytesPer: Record<PointField, number> = {
      pos: 12,
      color: 3,
      normal: 12,
      label: 4,
    };
    const perPoint = fields.reduce((s, f) => s + bytesPer[f], 0);
    if (buf.byteLength % perPoint !== 0) {
      throw new Error(`payload size ${buf.byteLength} not divisible by ${perPoint}`);
    }
    const n = buf.byteLength / perPoint;

    const out: PointData = { version };
    let offset = 0;
    for (const f of fields) {
      const bytes = bytesPer[f] * n;
      const slice = buf.slice(offset, offset + bytes);
      if (f === "pos") out.pos = new Float32Array(slice);
      else if (f === "color") out.color = new Uint8Array(slice);
      else if (f === "normal") out.normal = new Float32Array(slice);
      else out.label = new Int32Array(slice);
      offset += bytes;
    }
    return out;
  }

  async patchLabels(
    sessionId: string,
    indices: number[],
    region: number,
    version?: number,
  ): Promise<number> {
    const res = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/labels`, {
        method: "PATCH",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ indices, region, version }),
      }),
    );
    return (await res.json()).version as number;
  }

  async solve(sessionId: string, spec: object): Promise<SolveResult> {
    const res = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/solve`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(spec),
      }),
    );
    const json = await res.json();
    return {
      fixtureId: json.fixture_id,
      undefinedCount: json.undefined_count,
      cached: json.cached,
      solveMs: json.solve_ms,
      scalarMin: json.scalar_min,
      scalarMax: json.scalar_max,
    };
  }

  async getScalar(sessionId: string, fixtureId: string): Promise<Float64Array> {
    const res = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/fixtures/${fixtureId}/scalar`),
    );
    return new Float64Array(await res.arrayBuffer());
  }

  async getVectors(sessionId: string, fixtureId: string): Promise<Float64Array> {
    const res = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}/fixtures/${fixtureId}/vectors`),
    );
    return new Float64Array(await res.arrayBuffer());
  }

  async query(
    sessionId: string,
    fixtureId: string,
    positions: [number, number, number][],
  ): Promise<QueryResult[]> {
    const res = await expectOk(
      await fetch(
        `${this.baseUrl}/sessions/${sessionId}/fixtures/${fixtureId}/query`,
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ positions }),
        },
      ),
    );
    return (await res.json()).responses as QueryResult[];
  }

  async deleteSession(sessionId: string): Promise<void> {
    await expectOk(
      await fetch(`${this.baseUrl}/sessions/${sessionId}`, { method: "DELETE" }),
    );
  }
}
