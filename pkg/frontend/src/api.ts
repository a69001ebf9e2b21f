// Typed client for the gazeforge service. Renders and corrections carry
// monotonically increasing request ids so late responses from superseded
// requests are dropped instead of repainting stale state.

import type { MixtureSpecJson } from "./model.js";

export interface CorrectionResponse {
    transform: { tx: number; ty: number; theta: number; scale: number; pivot: [number, number] };
    correctedSpec: MixtureSpecJson;
    referencePrompt: string;
    residual: number;
    iterations: number;
    converged: boolean;
    metadata: Record<string, unknown>;
}

export interface GenerateResponse {
    imageB64: string;
    backendId: string;
    elapsedMs: number;
}

export class ApiError extends Error {
    readonly status: number;
    readonly field?: string;

    constructor(status: number, message: string, field?: string) {
        super(message);
        this.status = status;
        this.field = field;
    }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(url, init);
    const body = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
        throw new ApiError(
            resp.status,
            String(body.error ?? `HTTP ${resp.status}`),
            body.field as string | undefined,
        );
    }
    return body as T;
}

function post(body: unknown): RequestInit {
    return {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
    };
}

export class GazeForgeApi {
    readonly baseUrl: string;
    private renderSeq = 0;
    private renderSeen = 0;
    private correctSeq = 0;
    private correctSeen = 0;

    constructor(baseUrl: string) {
        this.baseUrl = baseUrl.replace(/\/$/, "");
    }

    async createSession(prompt: string): Promise<string> {
        const state = await request<{ sessionId: string }>(
            `${this.baseUrl}/sessions`,
            post({ prompt }),
        );
        return state.sessionId;
    }

    async putSpec(sessionId: string, spec: MixtureSpecJson): Promise<void> {
        await request(`${this.baseUrl}/sessions/${sessionId}/spec`, {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(spec),
        });
    }

    async getSpec(sessionId: string): Promise<MixtureSpecJson> {
        return request<MixtureSpecJson>(`${this.baseUrl}/sessions/${sessionId}/spec`);
    }

    // Resolves null when a newer render was issued before this one landed.
    async renderPreview(
        sessionId: string,
        width: number,
        height: number,
    ): Promise<string | null> {
        const ticket = ++this.renderSeq;
        const out = await request<{ smapB64: string }>(
            `${this.baseUrl}/sessions/${sessionId}/render?w=${width}&h=${height}`,
            post({}),
        );
        if (ticket <= this.renderSeen) return null;
        this.renderSeen = ticket;
        return out.smapB64;
    }

    async correct(
        sessionId: string,
        prompt: string,
        options: Record<string, unknown> = {},
    ): Promise<CorrectionResponse | null> {
        const ticket = ++this.correctSeq;
        const out = await request<CorrectionResponse>(
            `${this.baseUrl}/sessions/${sessionId}/correct`,
            post({ prompt, options }),
        );
        if (ticket <= this.correctSeen) return null;
        this.correctSeen = ticket;
        return out;
    }

    async generate(
        prompt: string,
        conditioningB64: string,
        width: number,
        height: number,
        seed = 0,
    ): Promise<GenerateResponse> {
        return request<GenerateResponse>(
            `${this.baseUrl}/generate`,
            post({ prompt, conditioningB64, width, height, seed, steps: 20 }),
        );
    }

    async healthz(): Promise<{ status: string; index: { loaded: boolean; records: number } }> {
        return request(`${this.baseUrl}/healthz`);
    }
}

// Residual badge formatting: three significant digits keeps the displayed
// number within 0.5% of the API value.
export function formatResidual(residual: number): string {
    if (residual === 0) return "0";
    return residual.toPrecision(3);
}

export function debounce<A extends unknown[]>(
    fn: (...args: A) => void,
    delayMs: number,
    timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
        set: setTimeout,
        clear: clearTimeout,
    },
): (...args: A) => void {
    let handle: ReturnType<typeof setTimeout> | undefined;
    return (...args: A) => {
        if (handle !== undefined) timers.clear(handle);
        handle = timers.set(() => fn(...args), delayMs);
    };
}
