/** Client-side session mirror: recent frames in ring buffers, no simulation. */

import { EventFrame, PoseFrame, SensorsFrame, SessionState, SpikeFrame } from "./types.js";

export const DEFAULT_WINDOW_MS = 10_000;

export class UiSessionView {
    state: SessionState | null = null;
    spikes: SpikeFrame[] = [];
    poses: PoseFrame[] = [];
    sensors: SensorsFrame[] = [];
    /** model time of the newest frame seen so far */
    latestT = 0;
    /** wall-clock ms of the last received batch (for staleness flagging) */
    lastContactWall = -Infinity;
    connected = false;

    constructor(public windowMs: number = DEFAULT_WINDOW_MS) {}

    ingest(frames: EventFrame[], nowWall: number): void {
        for (const frame of frames) {
            if (frame.type === "state") {
                const { type, ...state } = frame;
                this.state = state as SessionState;
                if (state.sim_time_ms > this.latestT) this.latestT = state.sim_time_ms;
            } else {
                if (frame.t > this.latestT) this.latestT = frame.t;
                if (frame.type === "spikes") this.spikes.push(frame);
                else if (frame.type === "pose") {
                    this.poses.push(frame);
                    if (this.state) {
                        this.state.sim_time_ms = frame.t;
                        this.state.pose = { x: frame.x, y: frame.y, theta: frame.theta };
                        this.state.collision_count = frame.collisions;
                    }
                } else this.sensors.push(frame);
            }
        }
        this.lastContactWall = nowWall;
        this.trim();
    }

    /** Drop frames older than the rolling window behind the newest model time. */
    private trim(): void {
        const cutoff = this.latestT - this.windowMs;
        this.spikes = this.spikes.filter((f) => f.t >= cutoff);
        this.poses = this.poses.filter((f) => f.t >= cutoff);
        this.sensors = this.sensors.filter((f) => f.t >= cutoff);
    }

    /**
     * Stale when disconnected, or when running and nothing has arrived for
     * `thresholdMs` of wall time.  Paused/idle sessions legitimately go quiet.
     */
    isStale(nowWall: number, thresholdMs = 2000): boolean {
        if (!this.connected) return true;
        if (this.state === null) return true;
        if (this.state.mode !== "running") return false;
        return nowWall - this.lastContactWall > thresholdMs;
    }

    spikeCount(): number {
        let n = 0;
        for (const f of this.spikes) n += f.events.length;
        return n;
    }
}
