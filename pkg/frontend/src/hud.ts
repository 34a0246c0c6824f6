// HUD readouts as plain strings so they are trivially testable.

import { FinTriple, StateMessage } from "./protocol.js";

export function speedOf(state: StateMessage): number {
    return Math.hypot(state.u, state.v);
}

export function finLabel(fins: FinTriple): string {
    const parts = [
        fins.left ? "L" : "·",
        fins.caudal ? "C" : "·",
        fins.right ? "R" : "·",
    ];
    return parts.join(" ");
}

export function hudLines(state: StateMessage | null, bodyLength: number): string[] {
    if (state === null) {
        return ["speed   —", "yaw     —", "fins    · · ·"];
    }
    const speed = speedOf(state);
    return [
        `speed  ${(speed * 100).toFixed(2)} cm/s  (${(speed / bodyLength).toFixed(2)} BL/s)`,
        `yaw    ${state.r.toFixed(3)} rad/s`,
        `fins   ${finLabel(state.fins)}`,
    ];
}
