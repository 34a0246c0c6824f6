// Top-down 2-D canvas rendering: metric grid, obstacles, trail, fish,
// and the 6 cm minimum-turn-radius reference circle around the fish.

import { ViewState } from "./viewState.js";

export const MIN_TURN_RADIUS_M = 0.06;

export function render(ctx: CanvasRenderingContext2D, view: ViewState, nowMs: number): void {
    const { width, height } = ctx.canvas;
    view.camera.centerPxX = width / 2;
    view.camera.centerPxY = height / 2;
    if (view.latest !== null) {
        // keep the fish centered with a light follow
        view.camera.focusX += 0.08 * (view.latest.x - view.camera.focusX);
        view.camera.focusY += 0.08 * (view.latest.y - view.camera.focusY);
    }

    ctx.fillStyle = "#082030";
    ctx.fillRect(0, 0, width, height);
    drawGrid(ctx, view);
    drawObstacles(ctx, view, nowMs);
    drawTrail(ctx, view);
    drawFish(ctx, view, nowMs);
}

function drawGrid(ctx: CanvasRenderingContext2D, view: ViewState): void {
    const cam = view.camera;
    const { width, height } = ctx.canvas;
    const [x0, y1] = cam.screenToWorld(0, 0);
    const [x1, y0] = cam.screenToWorld(width, height);
    const step = 0.1; // 10 cm metric grid
    ctx.strokeStyle = "#113549";
    ctx.lineWidth = 1;
    ctx.beginPath();
    for (let x = Math.floor(x0 / step) * step; x <= x1; x += step) {
        const [px] = cam.worldToScreen(x, 0);
        ctx.moveTo(px, 0);
        ctx.lineTo(px, height);
    }
    for (let y = Math.floor(y0 / step) * step; y <= y1; y += step) {
        const [, py] = cam.worldToScreen(0, y);
        ctx.moveTo(0, py);
        ctx.lineTo(width, py);
    }
    ctx.stroke();
}

function drawObstacles(ctx: CanvasRenderingContext2D, view: ViewState, nowMs: number): void {
    const flash = view.collisionFlash(nowMs);
    for (const obs of view.obstacles) {
        const [px, py] = view.camera.worldToScreen(obs.x_m, obs.y_m);
        ctx.beginPath();
        ctx.arc(px, py, obs.radius_m * view.camera.scale, 0, 2 * Math.PI);
        ctx.fillStyle = flash ? "#b3513d" : "#3d7a8a";
        ctx.fill();
        ctx.strokeStyle = "#9fd4e0";
        ctx.stroke();
    }
}

function drawTrail(ctx: CanvasRenderingContext2D, view: ViewState): void {
    if (view.trail.length < 2) {
        return;
    }
    ctx.strokeStyle = "#4fc3f7";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    view.trail.forEach((p, i) => {
        const [px, py] = view.camera.worldToScreen(p.x, p.y);
        if (i === 0) {
            ctx.moveTo(px, py);
        } else {
            ctx.lineTo(px, py);
        }
    });
    ctx.stroke();
}

function drawFish(ctx: CanvasRenderingContext2D, view: ViewState, nowMs: number): void {
    const state = view.latest;
    if (state === null) {
        return;
    }
    const cam = view.camera;
    const [px, py] = cam.worldToScreen(state.x, state.y);
    const bl = view.bodyLength * cam.scale;

    // minimum-turn-radius reference ring
    ctx.beginPath();
    ctx.arc(px, py, MIN_TURN_RADIUS_M * cam.scale, 0, 2 * Math.PI);
    ctx.strokeStyle = "rgba(255, 214, 102, 0.35)";
    ctx.setLineDash([6, 6]);
    ctx.stroke();
    ctx.setLineDash([]);

    // body: triangle pointing along the heading (screen y is flipped)
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-state.theta);
    ctx.fillStyle = view.collisionFlash(nowMs) ? "#ff8a65" : "#ffd666";
    ctx.beginPath();
    ctx.moveTo(0.55 * bl, 0);
    ctx.lineTo(-0.45 * bl, 0.3 * bl);
    ctx.lineTo(-0.3 * bl, 0);
    ctx.lineTo(-0.45 * bl, -0.3 * bl);
    ctx.closePath();
    ctx.fill();
    // active fins as dots: left pectoral, caudal, right pectoral
    ctx.fillStyle = "#e3f6ff";
    if (state.fins.left) {
        ctx.fillRect(-0.15 * bl, 0.28 * bl, 4, 4);
    }
    if (state.fins.right) {
        ctx.fillRect(-0.15 * bl, -0.28 * bl - 4, 4, 4);
    }
    if (state.fins.caudal) {
        ctx.fillRect(-0.6 * bl, -2, 5, 5);
    }
    ctx.restore();
}
