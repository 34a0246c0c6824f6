import { describe, expect, it } from "vitest";

import { finLabel, hudLines, speedOf } from "../src/hud.js";
import { StateMessage } from "../src/protocol.js";

const state: StateMessage = {
    type: "state", tick: 1000, t: 1.0, x: 0.1, y: 0.0, theta: 0.2,
    u: 0.08, v: 0.006, r: -0.9,
    fins: { left: true, right: false, caudal: true },
    events: [],
};

describe("hud", () => {
    it("speed is the planar magnitude", () => {
        expect(speedOf(state)).toBeCloseTo(Math.hypot(0.08, 0.006), 12);
    });

    it("reports cm/s and BL/s", () => {
        const lines = hudLines(state, 0.085);
        expect(lines[0]).toContain("8.02 cm/s");
        expect(lines[0]).toContain("0.94 BL/s");
        expect(lines[1]).toContain("-0.900 rad/s");
    });

    it("marks active fins", () => {
        expect(finLabel(state.fins)).toBe("L C ·");
    });

    it("renders placeholders with no state", () => {
        const lines = hudLines(null, 0.085);
        expect(lines[0]).toContain("—");
    });
});
