/** 2-D node-link view of the network: sensory column left, motor column right. */

import { NetworkInfo } from "./types.js";

export interface NodePosition {
    group: string;
    index: number;
    x: number;       // normalized [0, 1]
    y: number;
}

export interface GraphLayout {
    nodes: NodePosition[];
    nodeOf: Map<string, number>;   // "group:index" -> node position index
}

const COLUMN_X: Record<string, number> = { sensory: 0.15, inter: 0.5, motor: 0.85 };

export function layoutNetwork(network: NetworkInfo): GraphLayout {
    const nodes: NodePosition[] = [];
    const nodeOf = new Map<string, number>();
    const columns = new Map<number, number>();   // column x in mille -> used slots

    const total = new Map<number, number>();
    for (const group of network.groups) {
        const key = Math.round((COLUMN_X[group.kind] ?? 0.5) * 1000);
        total.set(key, (total.get(key) ?? 0) + group.size + 1);
    }
    for (const group of network.groups) {
        const x = COLUMN_X[group.kind] ?? 0.5;
        const key = Math.round(x * 1000);
        const slots = total.get(key)!;
        for (let i = 0; i < group.size; i++) {
            const used = (columns.get(key) ?? 0) + 1;
            columns.set(key, used);
            nodeOf.set(`${group.name}:${i}`, nodes.length);
            nodes.push({ group: group.name, index: i, x, y: used / (slots + 1) });
        }
        columns.set(key, (columns.get(key) ?? 0) + 1);   // gap between groups
    }
    return { nodes, nodeOf };
}

export function drawNetwork(
    ctx: CanvasRenderingContext2D,
    network: NetworkInfo,
    layout: GraphLayout,
    recentlyFired: Set<string>,
    width: number,
    height: number,
): void {
    ctx.clearRect(0, 0, width, height);
    const byId = new Map(network.groups.map((g) => [g.id, g.name]));

    ctx.lineWidth = 1;
    for (const synapse of network.synapses) {
        const pre = layout.nodeOf.get(`${byId.get(synapse.pre[0])}:${synapse.pre[1]}`);
        const post = layout.nodeOf.get(`${byId.get(synapse.post[0])}:${synapse.post[1]}`);
        if (pre === undefined || post === undefined) continue;
        const a = layout.nodes[pre];
        const b = layout.nodes[post];
        ctx.strokeStyle = synapse.weight >= 0 ? "rgba(129,199,132,0.45)"
            : "rgba(229,115,115,0.45)";
        ctx.beginPath();
        ctx.moveTo(a.x * width, a.y * height);
        ctx.lineTo(b.x * width, b.y * height);
        ctx.stroke();
    }

    ctx.font = "10px sans-serif";
    let lastGroup = "";
    for (const node of layout.nodes) {
        const x = node.x * width;
        const y = node.y * height;
        const hot = recentlyFired.has(`${node.group}:${node.index}`);
        ctx.fillStyle = hot ? "#fff176" : "#4dd0e1";
        ctx.beginPath();
        ctx.arc(x, y, hot ? 6 : 4, 0, 2 * Math.PI);
        ctx.fill();
        if (node.group !== lastGroup) {
            ctx.fillStyle = "#9aa5b1";
            ctx.fillText(node.group, x + 9, y + 3);
            lastGroup = node.group;
        }
    }
}
