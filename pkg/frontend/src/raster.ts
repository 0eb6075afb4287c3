/** Spike raster: one row per neuron, rows grouped and labeled by group name. */

import { NetworkInfo, SpikeFrame } from "./types.js";

export interface RasterRow {
    group: string;
    index: number;
    /** set on the first row of each group */
    label: string | null;
}

export interface RasterLayout {
    rows: RasterRow[];
    rowOf: Map<string, number>; // "group:index" -> row
}

export function buildLayout(network: NetworkInfo): RasterLayout {
    const rows: RasterRow[] = [];
    const rowOf = new Map<string, number>();
    for (const group of network.groups) {
        for (let i = 0; i < group.size; i++) {
            rowOf.set(`${group.name}:${i}`, rows.length);
            rows.push({ group: group.name, index: i, label: i === 0 ? group.name : null });
        }
    }
    return { rows, rowOf };
}

export interface RasterMark {
    t: number;
    row: number;
    group: string;
    index: number;
}

/** One mark per received spike event; unknown groups get appended rows. */
export function marksFrom(frames: SpikeFrame[], layout: RasterLayout): RasterMark[] {
    const marks: RasterMark[] = [];
    for (const frame of frames) {
        for (const [group, index] of frame.events) {
            const key = `${group}:${index}`;
            let row = layout.rowOf.get(key);
            if (row === undefined) {
                row = layout.rows.length;
                layout.rowOf.set(key, row);
                layout.rows.push({ group, index, label: index === 0 ? group : null });
            }
            marks.push({ t: frame.t, row, group, index });
        }
    }
    return marks;
}

const GROUP_COLORS = ["#4dd0e1", "#ffb74d", "#81c784", "#e57373", "#ba68c8", "#fff176"];

export function groupColor(layout: RasterLayout, group: string): string {
    const names: string[] = [];
    for (const row of layout.rows) {
        if (!names.includes(row.group)) names.push(row.group);
    }
    const at = names.indexOf(group);
    return GROUP_COLORS[(at >= 0 ? at : names.length) % GROUP_COLORS.length];
}

export function drawRaster(
    ctx: CanvasRenderingContext2D,
    layout: RasterLayout,
    marks: RasterMark[],
    tNow: number,
    windowMs: number,
    width: number,
    height: number,
): void {
    ctx.clearRect(0, 0, width, height);
    const labelWidth = 86;
    const plotWidth = width - labelWidth;
    const rowHeight = height / Math.max(layout.rows.length, 1);
    const t0 = tNow - windowMs;

    ctx.font = "10px sans-serif";
    ctx.textBaseline = "top";
    for (let r = 0; r < layout.rows.length; r++) {
        const row = layout.rows[r];
        if (row.label) {
            ctx.fillStyle = "#9aa5b1";
            ctx.fillText(row.label, 4, r * rowHeight + 1);
            ctx.strokeStyle = "#2a3440";
            ctx.beginPath();
            ctx.moveTo(0, r * rowHeight + 0.5);
            ctx.lineTo(width, r * rowHeight + 0.5);
            ctx.stroke();
        }
    }
    for (const mark of marks) {
        if (mark.t < t0 || mark.t > tNow) continue;
        const x = labelWidth + ((mark.t - t0) / windowMs) * plotWidth;
        const y = mark.row * rowHeight;
        ctx.fillStyle = groupColor(layout, mark.group);
        ctx.fillRect(x, y + 1, 1.5, Math.max(rowHeight - 2, 1));
    }
    // model-time axis, right edge = now
    ctx.fillStyle = "#9aa5b1";
    ctx.textBaseline = "bottom";
    ctx.fillText(`${(t0 / 1000).toFixed(1)} s`, labelWidth, height - 2);
    const nowLabel = `${(tNow / 1000).toFixed(1)} s`;
    ctx.fillText(nowLabel, width - ctx.measureText(nowLabel).width - 4, height - 2);
}
