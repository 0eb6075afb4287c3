/** REST + WebSocket plumbing for the control API, with reconnecting events. */

import { ControlCommand, EventFrame, NetworkInfo, SessionState } from "./types.js";

export interface ControlResult {
    ok: boolean;
    state: SessionState | null;
    error?: string;
}

export class ApiClient {
    constructor(public base: string = "") {}

    async getState(): Promise<SessionState> {
        const res = await fetch(`${this.base}/api/state`);
        if (!res.ok) throw new Error(`GET /api/state -> ${res.status}`);
        return res.json();
    }

    async getNetwork(): Promise<NetworkInfo> {
        const res = await fetch(`${this.base}/api/network`);
        if (!res.ok) throw new Error(`GET /api/network -> ${res.status}`);
        return res.json();
    }

    /** Send a control command; 409 means the transition was rejected. */
    async control(command: ControlCommand): Promise<ControlResult> {
        const res = await fetch(`${this.base}/api/control`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(command),
        });
        const body = await res.json();
        if (res.status === 409) {
            return { ok: false, state: body.state ?? null, error: body.error };
        }
        if (!res.ok) throw new Error(`POST /api/control -> ${res.status}`);
        return { ok: true, state: body };
    }

    async addGroup(name: string, size: number, kind: string): Promise<ControlResult> {
        const res = await fetch(`${this.base}/api/network/groups`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ name, size, kind }),
        });
        const body = await res.json();
        return { ok: res.ok, state: null, error: body.error };
    }

    async addConnection(pre: [string, number], post: [string, number],
                        weight: number, delay: number): Promise<ControlResult> {
        const res = await fetch(`${this.base}/api/network/connections`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ pre, post, weight, delay }),
        });
        const body = await res.json();
        return { ok: res.ok, state: null, error: body.error };
    }
}

export const BACKOFF_START_MS = 500;
export const BACKOFF_MAX_MS = 8000;

/** Doubling backoff, capped. Pure so it can be tested. */
export function nextBackoff(current: number): number {
    if (current <= 0) return BACKOFF_START_MS;
    return Math.min(current * 2, BACKOFF_MAX_MS);
}

export type SocketStatus = "connecting" | "open" | "retrying";

/** Subscribes to /api/events and reconnects with backoff when dropped. */
export class EventsSocket {
    private ws: WebSocket | null = null;
    private backoff = 0;
    private timer: ReturnType<typeof setTimeout> | null = null;
    private closed = false;

    constructor(
        private url: string,
        private onFrames: (frames: EventFrame[]) => void,
        private onStatus: (status: SocketStatus) => void,
    ) {}

    connect(): void {
        if (this.closed) return;
        this.onStatus("connecting");
        this.ws = new WebSocket(this.url);
        this.ws.onopen = () => {
            this.backoff = 0;
            this.onStatus("open");
        };
        this.ws.onmessage = (event) => {
            this.onFrames(JSON.parse(event.data as string) as EventFrame[]);
        };
        this.ws.onclose = () => this.scheduleReconnect();
        this.ws.onerror = () => this.ws?.close();
    }

    private scheduleReconnect(): void {
        if (this.closed) return;
        this.backoff = nextBackoff(this.backoff);
        this.onStatus("retrying");
        this.timer = setTimeout(() => this.connect(), this.backoff);
    }

    close(): void {
        this.closed = true;
        if (this.timer !== null) clearTimeout(this.timer);
        this.ws?.close();
    }
}
