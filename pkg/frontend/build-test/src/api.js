export class ApiError extends Error {
    status;
    code;
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
/** Thin typed client over /api/v1; the fetch function is injectable so
 * contract tests can run against recorded fixtures. */
export class MtLoopApi {
    base;
    fetchFn;
    constructor(base = "/api/v1", fetchFn = (url, init) => fetch(url, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
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
                const body = (await response.json());
                code = body.code ?? code;
                message = body.message ?? message;
            }
            catch {
                // non-JSON error body; keep defaults
            }
            throw new ApiError(response.status, code, message);
        }
        return (await response.json());
    }
    nextSegment(annotator, strategy) {
        const params = new URLSearchParams({ annotator });
        if (strategy)
            params.set("strategy", strategy);
        return this.request(`/segments/next?${params}`);
    }
    async submitAnnotation(body) {
        return (await this.request("/annotations", {
            method: "POST",
            body: JSON.stringify(body),
        }));
    }
    async stats() {
        return (await this.request("/admin/stats"));
    }
    async setThreshold(tau) {
        return (await this.request("/admin/threshold", {
            method: "PUT",
            body: JSON.stringify({ tau }),
        }));
    }
    async setWeights(weights) {
        return (await this.request("/admin/weights", {
            method: "PUT",
            body: JSON.stringify({ weights }),
        }));
    }
    async autoLabel() {
        return (await this.request("/admin/auto-label", {
            method: "POST",
        }));
    }
    async segmentHistograms(rated) {
        return (await this.request(`/admin/segments?rated=${rated}`));
    }
    async annotators() {
        return (await this.request("/admin/annotators"));
    }
}
