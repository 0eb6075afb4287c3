/** Page bootstrap: wires the API, the event stream, and the three canvases. */

import { drawArena, computeViewTransform, Wall } from "./arena.js";
import { ApiClient, EventsSocket, SocketStatus } from "./client.js";
import { applyEnablement, CommandName } from "./controls.js";
import { UiSessionView } from "./model.js";
import { drawNetwork, layoutNetwork, GraphLayout } from "./netgraph.js";
import { buildLayout, drawRaster, marksFrom, RasterLayout } from "./raster.js";
import { ControlCommand, NetworkInfo, SessionState } from "./types.js";

const RASTER_WINDOW_MS = 10_000;
const HOT_WINDOW_MS = 150;

interface WorldInfo {
    name: string;
    walls: Wall[];
    start: [number, number, number] | null;
    body_radius: number;
}

function el<T extends HTMLElement>(id: string): T {
    const found = document.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
}

function canvasCtx(id: string): [HTMLCanvasElement, CanvasRenderingContext2D] {
    const canvas = el<HTMLCanvasElement>(id);
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error(`no 2d context for #${id}`);
    return [canvas, ctx];
}

class App {
    api = new ApiClient();
    view = new UiSessionView(RASTER_WINDOW_MS);
    network: NetworkInfo = { groups: [], synapses: [] };
    world: WorldInfo = { name: "?", walls: [], start: null, body_radius: 0.037 };
    rasterLayout: RasterLayout = { rows: [], rowOf: new Map() };
    graphLayout: GraphLayout = { nodes: [], nodeOf: new Map() };

    buttons: Record<CommandName, HTMLButtonElement> = {
        start: el("btn-start"),
        pause: el("btn-pause"),
        step: el("btn-step"),
        continue: el("btn-continue"),
        stop: el("btn-stop"),
    };

    async boot(): Promise<void> {
        await this.refreshNetwork();
        this.world = await (await fetch("/api/world")).json();
        this.setState(await this.api.getState());

        const proto = location.protocol === "https:" ? "wss:" : "ws:";
        const socket = new EventsSocket(
            `${proto}//${location.host}/api/events`,
            (frames) => {
                this.view.ingest(frames, performance.now());
                if (this.view.state) this.setState(this.view.state);
            },
            (status) => this.setSocketStatus(status),
        );
        socket.connect();

        for (const [name, button] of Object.entries(this.buttons)) {
            button.addEventListener("click", () =>
                this.sendControl({ cmd: name as CommandName, n_ms: name === "step" ? 1 : undefined }));
        }
        const slider = el<HTMLInputElement>("speed-slider");
        slider.addEventListener("change", () => {
            const factor = Math.pow(10, Number(slider.value));
            el("speed-label").textContent = factor === 0 ? "max" : `${factor.toFixed(2)}x`;
            void this.sendControl({ cmd: "speed", factor });
        });
        el<HTMLButtonElement>("btn-speed-max").addEventListener("click", () => {
            el("speed-label").textContent = "max";
            void this.sendControl({ cmd: "speed", factor: 0 });
        });

        el<HTMLFormElement>("group-form").addEventListener("submit", (ev) => {
            ev.preventDefault();
            void this.submitGroup();
        });
        el<HTMLFormElement>("connection-form").addEventListener("submit", (ev) => {
            ev.preventDefault();
            void this.submitConnection();
        });

        const render = () => {
            this.render();
            requestAnimationFrame(render);
        };
        requestAnimationFrame(render);
    }

    async refreshNetwork(): Promise<void> {
        this.network = await this.api.getNetwork();
        this.rasterLayout = buildLayout(this.network);
        this.graphLayout = layoutNetwork(this.network);
    }

    async sendControl(command: ControlCommand): Promise<void> {
        try {
            const result = await this.api.control(command);
            if (result.state) this.setState(result.state);
            this.flash(result.ok ? "" : result.error ?? "rejected");
        } catch (err) {
            this.flash(String(err));
        }
    }

    async submitGroup(): Promise<void> {
        const name = el<HTMLInputElement>("group-name").value.trim();
        const size = Number(el<HTMLInputElement>("group-size").value);
        const kind = el<HTMLSelectElement>("group-kind").value;
        const result = await this.api.addGroup(name, size, kind);
        this.flash(result.ok ? `added ${name}` : result.error ?? "rejected");
        if (result.ok) await this.refreshNetwork();
    }

    async submitConnection(): Promise<void> {
        const pre: [string, number] = [
            el<HTMLInputElement>("conn-pre-group").value.trim(),
            Number(el<HTMLInputElement>("conn-pre-index").value)];
        const post: [string, number] = [
            el<HTMLInputElement>("conn-post-group").value.trim(),
            Number(el<HTMLInputElement>("conn-post-index").value)];
        const weight = Number(el<HTMLInputElement>("conn-weight").value);
        const delay = Number(el<HTMLInputElement>("conn-delay").value);
        const result = await this.api.addConnection(pre, post, weight, delay);
        this.flash(result.ok ? "connected" : result.error ?? "rejected");
        if (result.ok) await this.refreshNetwork();
    }

    setState(state: SessionState): void {
        this.view.state = state;
        el("mode-value").textContent = state.mode;
        el("time-value").textContent = `${(state.sim_time_ms / 1000).toFixed(3)} s`;
        el("collisions-value").textContent = String(state.collision_count);
        el("factor-value").textContent =
            state.rt_factor === 0 ? "max" : `${state.rt_factor}x`;
        applyEnablement(this.buttons, state.mode);
        const editable = state.mode === "idle";
        el<HTMLFieldSetElement>("group-fieldset").disabled = !editable;
        el<HTMLFieldSetElement>("connection-fieldset").disabled = !editable;
    }

    setSocketStatus(status: SocketStatus): void {
        this.view.connected = status === "open";
        const badge = el("link-badge");
        badge.dataset.status = status;
        badge.textContent = status === "open" ? "live" : status;
    }

    flash(message: string): void {
        el("flash").textContent = message;
    }

    render(): void {
        const stale = this.view.isStale(performance.now());
        el("stale-badge").hidden = !stale;

        const [arenaCanvas, arenaCtx] = canvasCtx("arena");
        drawArena(arenaCtx,
            computeViewTransform(this.world.walls, arenaCanvas.width, arenaCanvas.height),
            this.world.walls, this.view.poses,
            this.view.state?.pose ?? null, this.world.body_radius,
            arenaCanvas.width, arenaCanvas.height);

        const [rasterCanvas, rasterCtx] = canvasCtx("raster");
        const marks = marksFrom(this.view.spikes, this.rasterLayout);
        drawRaster(rasterCtx, this.rasterLayout, marks, this.view.latestT,
            RASTER_WINDOW_MS, rasterCanvas.width, rasterCanvas.height);

        const [netCanvas, netCtx] = canvasCtx("network");
        const hot = new Set<string>();
        for (const frame of this.view.spikes) {
            if (frame.t >= this.view.latestT - HOT_WINDOW_MS) {
                for (const [group, index] of frame.events) hot.add(`${group}:${index}`);
            }
        }
        drawNetwork(netCtx, this.network, this.graphLayout, hot,
            netCanvas.width, netCanvas.height);
    }
}

void new App().boot();
