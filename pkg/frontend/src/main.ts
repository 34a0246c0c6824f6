// Browser wiring: WebSocket, keyboard/buttons, scenario picker, HUD,
// status banner, stale-stream warning and the render loop.

import { hudLines } from "./hud.js";
import { FinKeyTracker, FinName } from "./input.js";
import {
    helloMessage,
    parseServerMessage,
    resetMessage,
    setFinsMessage,
} from "./protocol.js";
import { render } from "./render.js";
import { ViewState } from "./viewState.js";

const view = new ViewState();
const tracker = new FinKeyTracker();
let socket: WebSocket | null = null;

const canvas = document.getElementById("tank") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const hud = document.getElementById("hud")!;
const picker = document.getElementById("scenario") as HTMLSelectElement;
const addressInput = document.getElementById("address") as HTMLInputElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;
const finButtons: Record<FinName, HTMLButtonElement> = {
    left: document.getElementById("fin-left") as HTMLButtonElement,
    caudal: document.getElementById("fin-caudal") as HTMLButtonElement,
    right: document.getElementById("fin-right") as HTMLButtonElement,
};

const params = new URLSearchParams(window.location.search);
addressInput.value = params.get("server") ?? "ws://127.0.0.1:8765";

function setBanner(text: string, tone: "ok" | "warn" | "err"): void {
    banner.textContent = text;
    banner.className = tone;
}

function setControlsEnabled(enabled: boolean): void {
    picker.disabled = !enabled;
    for (const btn of Object.values(finButtons)) {
        btn.disabled = !enabled;
    }
}

function sendFins(): void {
    if (socket !== null && socket.readyState === WebSocket.OPEN) {
        socket.send(setFinsMessage(tracker.current));
    }
}

function connect(): void {
    socket?.close();
    view.status = "connecting";
    setBanner("connecting…", "warn");
    const ws = new WebSocket(addressInput.value);
    socket = ws;

    ws.onopen = () => {
        ws.send(helloMessage());
    };
    ws.onmessage = (event) => {
        const msg = parseServerMessage(String(event.data));
        if (msg.type === "welcome") {
            view.status = "connected";
            view.role = msg.role;
            view.scenarios = msg.scenarios;
            view.bodyLength = msg.body_length_m;
            picker.innerHTML = "";
            for (const name of msg.scenarios) {
                const opt = document.createElement("option");
                opt.value = name;
                opt.textContent = name;
                picker.appendChild(opt);
            }
            picker.value = msg.scenario;
            setBanner(`connected (${msg.role}, server ${msg.server_version})`,
                msg.role === "controller" ? "ok" : "warn");
            setControlsEnabled(msg.role === "controller");
            if (msg.role === "controller") {
                // the sim pauses when a controller drops; take over running
                ws.send(JSON.stringify({ type: "resume" }));
            }
        } else if (msg.type === "scenario") {
            view.setScenario(msg.scenario.name, msg.scenario.obstacles);
            picker.value = msg.scenario.name;
        } else if (msg.type === "state") {
            view.pushState(msg, performance.now());
        } else {
            setBanner(`server error: ${msg.message}`, "err");
        }
    };
    ws.onclose = () => {
        if (socket === ws) {
            view.status = "disconnected";
            setBanner("disconnected", "err");
            setControlsEnabled(false);
        }
    };
}

connectBtn.addEventListener("click", connect);
picker.addEventListener("change", () => {
    socket?.send(resetMessage(picker.value));
});

window.addEventListener("keydown", (event) => {
    if (event.target === addressInput) {
        return;
    }
    if (tracker.keyEvent(event.key, true) !== null) {
        sendFins();
    }
});
window.addEventListener("keyup", (event) => {
    if (tracker.keyEvent(event.key, false) !== null) {
        sendFins();
    }
});
window.addEventListener("blur", () => {
    if (tracker.releaseAll() !== null) {
        sendFins();
    }
});
for (const [fin, btn] of Object.entries(finButtons) as [FinName, HTMLButtonElement][]) {
    btn.addEventListener("pointerdown", () => {
        if (tracker.buttonEvent(fin, true) !== null) {
            sendFins();
        }
    });
    const release = () => {
        if (tracker.buttonEvent(fin, false) !== null) {
            sendFins();
        }
    };
    btn.addEventListener("pointerup", release);
    btn.addEventListener("pointerleave", release);
}

function frame(): void {
    const now = performance.now();
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    render(ctx, view, now);
    hud.textContent = hudLines(view.latest, view.bodyLength).join("\n");
    for (const [fin, btn] of Object.entries(finButtons) as [FinName, HTMLButtonElement][]) {
        btn.classList.toggle("active", tracker.current[fin]);
        btn.classList.toggle("echo", view.latest?.fins[fin] ?? false);
    }
    if (view.stale(now)) {
        setBanner("no state from server for > 1 s", "warn");
    }
    requestAnimationFrame(frame);
}

setControlsEnabled(false);
connect();
requestAnimationFrame(frame);
