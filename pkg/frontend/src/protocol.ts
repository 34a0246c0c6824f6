// Wire protocol shared with the simulation server: one JSON object per
// WebSocket text frame.

export const PROTOCOL_VERSION = 1;

export interface FinTriple {
    left: boolean;
    right: boolean;
    caudal: boolean;
}

export const FINS_OFF: FinTriple = { left: false, right: false, caudal: false };

export interface CollisionEvent {
    t: number;
    obstacle_index: number;
    contact_point: [number, number];
}

export interface StateMessage {
    type: "state";
    tick: number;
    t: number;
    x: number;
    y: number;
    theta: number;
    u: number;
    v: number;
    r: number;
    fins: FinTriple;
    events: CollisionEvent[];
}

export interface WelcomeMessage {
    type: "welcome";
    server_version: string;
    protocol_version: number;
    scenarios: string[];
    role: "controller" | "observer";
    scenario: string;
    dt_s: number;
    body_length_m: number;
}

export interface ObstacleSpec {
    x_m: number;
    y_m: number;
    radius_m: number;
}

export interface ScenarioMessage {
    type: "scenario";
    scenario: {
        name: string;
        obstacles: ObstacleSpec[];
    };
}

export interface ErrorMessage {
    type: "error";
    code: string;
    message: string;
}

export type ServerMessage = StateMessage | WelcomeMessage | ScenarioMessage | ErrorMessage;

export function parseServerMessage(raw: string): ServerMessage {
    const msg = JSON.parse(raw);
    if (typeof msg !== "object" || msg === null || typeof msg.type !== "string") {
        throw new Error("not a server message");
    }
    switch (msg.type) {
        case "state":
        case "welcome":
        case "scenario":
        case "error":
            return msg as ServerMessage;
        default:
            throw new Error(`unknown server message type ${msg.type}`);
    }
}

export function helloMessage(): string {
    return JSON.stringify({ type: "hello", protocol_version: PROTOCOL_VERSION });
}

export function setFinsMessage(fins: FinTriple): string {
    return JSON.stringify({
        type: "set_fins",
        left: fins.left,
        right: fins.right,
        caudal: fins.caudal,
    });
}

export function resetMessage(scenario: string): string {
    return JSON.stringify({ type: "reset", scenario });
}

export function sameFins(a: FinTriple, b: FinTriple): boolean {
    return a.left === b.left && a.right === b.right && a.caudal === b.caudal;
}
