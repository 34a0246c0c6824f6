// Client-side view model: latest state, position trail, camera transform
// and connection bookkeeping.  Physics lives on the server; nothing here
// mutates simulation state.

import { ObstacleSpec, StateMessage } from "./protocol.js";

export const TRAIL_CAPACITY = 600;

export interface TrailPoint {
    tick: number;
    x: number;
    y: number;
}

export type ConnectionStatus = "idle" | "connecting" | "connected" | "disconnected";

export class Camera {
    // world-to-screen: screen = center_px + scale * (world - focus), y flipped
    constructor(
        public focusX = 0,
        public focusY = 0,
        public scale = 900, // px per meter
        public centerPxX = 0,
        public centerPxY = 0,
    ) {}

    worldToScreen(x: number, y: number): [number, number] {
        return [
            this.centerPxX + this.scale * (x - this.focusX),
            this.centerPxY - this.scale * (y - this.focusY),
        ];
    }

    screenToWorld(px: number, py: number): [number, number] {
        return [
            this.focusX + (px - this.centerPxX) / this.scale,
            this.focusY - (py - this.centerPxY) / this.scale,
        ];
    }
}

export class ViewState {
    latest: StateMessage | null = null;
    trail: TrailPoint[] = [];
    camera = new Camera();
    status: ConnectionStatus = "idle";
    role = "";
    scenarioName = "";
    scenarios: string[] = [];
    obstacles: ObstacleSpec[] = [];
    bodyLength = 0.085;
    lastStateWall = 0; // ms timestamp of the newest state message
    lastCollisionWall = -1e9;

    pushState(msg: StateMessage, nowMs: number): void {
        if (this.latest !== null && msg.tick < this.latest.tick) {
            this.trail = []; // tick went backwards: the server was reset
        }
        this.latest = msg;
        this.lastStateWall = nowMs;
        if (msg.events.length > 0) {
            this.lastCollisionWall = nowMs;
        }
        const last = this.trail[this.trail.length - 1];
        if (last === undefined || msg.tick > last.tick) {
            this.trail.push({ tick: msg.tick, x: msg.x, y: msg.y });
            if (this.trail.length > TRAIL_CAPACITY) {
                this.trail.splice(0, this.trail.length - TRAIL_CAPACITY);
            }
        }
    }

    setScenario(name: string, obstacles: ObstacleSpec[]): void {
        this.scenarioName = name;
        this.obstacles = obstacles;
        this.trail = [];
    }

    stale(nowMs: number, thresholdMs = 1000): boolean {
        return this.status === "connected"
            && this.latest !== null
            && nowMs - this.lastStateWall > thresholdMs;
    }

    collisionFlash(nowMs: number, windowMs = 400): boolean {
        return nowMs - this.lastCollisionWall < windowMs;
    }
}
