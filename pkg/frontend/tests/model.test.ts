import { describe, expect, it } from "vitest";

import { UiSessionView } from "../src/model.js";
import { EventFrame, SessionState } from "../src/types.js";

const state = (over: Partial<SessionState> = {}): EventFrame => ({
    type: "state",
    mode: "idle",
    sim_time_ms: 0,
    rt_factor: 0,
    pose: { x: 0.16, y: 0.16, theta: 0.785 },
    collision_count: 0,
    ...over,
});

describe("UiSessionView", () => {
    it("mirrors the newest state frame", () => {
        const view = new UiSessionView();
        view.ingest([state(), state({ mode: "running", sim_time_ms: 40 })], 0);
        expect(view.state?.mode).toBe("running");
        expect(view.state?.sim_time_ms).toBe(40);
        expect(view.latestT).toBe(40);
    });

    it("keeps only the rolling window of frames", () => {
        const view = new UiSessionView(1000);
        for (let t = 0; t <= 2500; t += 100) {
            view.ingest([{ type: "spikes", t, events: [["ctx.tof", 0]] }], t);
        }
        expect(view.spikes.length).toBe(11); // t in [1500, 2500]
        expect(view.spikes[0].t).toBe(1500);
        expect(view.spikeCount()).toBe(11);
    });

    it("updates pose and time from pose frames", () => {
        const view = new UiSessionView();
        view.ingest([state()], 0);
        view.ingest([{ type: "pose", t: 120, x: 0.2, y: 0.3, theta: 1.0,
                       collisions: 2 }], 1);
        expect(view.state?.sim_time_ms).toBe(120);
        expect(view.state?.pose.y).toBe(0.3);
        expect(view.state?.collision_count).toBe(2);
    });

    it("renders only received data: no frames, no state", () => {
        const view = new UiSessionView();
        expect(view.state).toBeNull();
        expect(view.spikes).toEqual([]);
        expect(view.poses).toEqual([]);
    });

    describe("staleness", () => {
        it("is stale while disconnected", () => {
            const view = new UiSessionView();
            view.ingest([state()], 0);
            view.connected = false;
            expect(view.isStale(10)).toBe(true);
        });

        it("is fresh right after frames arrive", () => {
            const view = new UiSessionView();
            view.connected = true;
            view.ingest([state({ mode: "running" })], 1000);
            expect(view.isStale(1100)).toBe(false);
        });

        it("goes stale when a running session stops sending", () => {
            const view = new UiSessionView();
            view.connected = true;
            view.ingest([state({ mode: "running" })], 1000);
            expect(view.isStale(4000)).toBe(true);
        });

        it("a paused session is allowed to be quiet", () => {
            const view = new UiSessionView();
            view.connected = true;
            view.ingest([state({ mode: "paused" })], 1000);
            expect(view.isStale(60_000)).toBe(false);
        });
    });
});
