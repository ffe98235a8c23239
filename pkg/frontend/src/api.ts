import type {
  AdminStats,
  AnnotationBody,
  AutoLabelResult,
  NextSample,
  Receipt,
  SegmentHistograms,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over /api/v1; the fetch function is injectable so
 * contract tests can run against recorded fixtures. */
export class MtLoopApi {
  constructor(
    private base: string = "/api/v1",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T | null> {
    const response = await this.fetchFn(this.base + path, {
      ...init,
      headers: { "content-type": "application/json", ...(init?.headers ?? {}) },
    });
    if (response.status === 204) {
      return null;
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  nextSegment(annotator: string, strategy?: string): Promise<NextSample | null> {
    const params = new URLSearchParams({ annotator });
    if (strategy) params.set("strategy", strategy);
    return this.request<NextSample>(`/segments/next?${params}`);
  }

  async submitAnnotation(body: AnnotationBody): Promise<Receipt> {
    return (await this.request<Receipt>("/annotations", {
      method: "POST",
      body: JSON.stringify(body),
    }))!;
  }

  async stats(): Promise<AdminStats> {
    return (await this.request<AdminStats>("/admin/stats"))!;
  }

  async setThreshold(tau: number): Promise<{ tau: number }> {
    return (await this.request<{ tau: number }>("/admin/threshold", {
      method: "PUT",
      body: JSON.stringify({ tau }),
    }))!;
  }

  async setWeights(weights: number[]): Promise<{ weights: number[] }> {
    return (await this.request<{ weights: number[] }>("/admin/weights", {
      method: "PUT",
      body: JSON.stringify({ weights }),
    }))!;
  }

  async autoLabel(): Promise<AutoLabelResult> {
    return (await this.request<AutoLabelResult>("/admin/auto-label", {
      method: "POST",
    }))!;
  }

  async segmentHistograms(rated: boolean): Promise<SegmentHistograms> {
    return (await this.request<SegmentHistograms>(`/admin/segments?rated=${rated}`))!;
  }

  async annotators(): Promise<{ annotators: AdminStats["per_annotator"] }> {
    return (await this.request<{ annotators: AdminStats["per_annotator"] }>(
      "/admin/annotators",
    ))!;
  }
}
