/** Arena view: walls, robot disc with heading tick, fading trajectory. */

import { PoseFrame } from "./types.js";

export type Wall = [number, number, number, number];

export interface ViewTransform {
    scale: number;      // px per meter
    ox: number;         // px offset
    oy: number;
    height: number;     // canvas px height (y is flipped to point up)
}

/** Fit the wall bounding box (plus margin) into a canvas, preserving aspect. */
export function computeViewTransform(
    walls: Wall[],
    width: number,
    height: number,
    marginM = 0.08,
): ViewTransform {
    let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
    for (const [x1, y1, x2, y2] of walls) {
        minX = Math.min(minX, x1, x2);
        maxX = Math.max(maxX, x1, x2);
        minY = Math.min(minY, y1, y2);
        maxY = Math.max(maxY, y1, y2);
    }
    if (!walls.length) {
        minX = minY = 0;
        maxX = maxY = 1;
    }
    minX -= marginM; minY -= marginM; maxX += marginM; maxY += marginM;
    const scale = Math.min(width / (maxX - minX), height / (maxY - minY));
    return { scale, ox: -minX * scale, oy: -minY * scale, height };
}

export function toPx(view: ViewTransform, x: number, y: number): [number, number] {
    return [x * view.scale + view.ox, view.height - (y * view.scale + view.oy)];
}

export function drawArena(
    ctx: CanvasRenderingContext2D,
    view: ViewTransform,
    walls: Wall[],
    trail: PoseFrame[],
    pose: { x: number; y: number; theta: number } | null,
    bodyRadiusM: number,
    width: number,
    height: number,
): void {
    ctx.clearRect(0, 0, width, height);

    ctx.strokeStyle = "#7d8a99";
    ctx.lineWidth = 2;
    for (const [x1, y1, x2, y2] of walls) {
        const [ax, ay] = toPx(view, x1, y1);
        const [bx, by] = toPx(view, x2, y2);
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        ctx.stroke();
    }

    ctx.lineWidth = 1.5;
    for (let i = 1; i < trail.length; i++) {
        const a = trail[i - 1];
        const b = trail[i];
        ctx.strokeStyle = `rgba(77, 208, 225, ${0.15 + 0.85 * (i / trail.length)})`;
        ctx.beginPath();
        ctx.moveTo(...toPx(view, a.x, a.y));
        ctx.lineTo(...toPx(view, b.x, b.y));
        ctx.stroke();
    }

    if (pose) {
        const [cx, cy] = toPx(view, pose.x, pose.y);
        const r = bodyRadiusM * view.scale;
        ctx.fillStyle = "#4dd0e1";
        ctx.beginPath();
        ctx.arc(cx, cy, r, 0, 2 * Math.PI);
        ctx.fill();
        ctx.strokeStyle = "#0b1016";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(cx, cy);
        // screen y points down, model theta is counterclockwise
        ctx.lineTo(cx + r * Math.cos(pose.theta), cy - r * Math.sin(pose.theta));
        ctx.stroke();
    }
}
