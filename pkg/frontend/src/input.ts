// Hold-to-activate fin control.  Keys map to fins (A = left pectoral,
// D = right pectoral, W or Space = caudal); on-screen buttons feed the
// same tracker.  Every *change* of the fin triple yields exactly one
// command; key auto-repeat and redundant events yield none.

import { FinTriple, sameFins } from "./protocol.js";

export type FinName = "left" | "right" | "caudal";

const KEY_TO_FIN: Record<string, FinName> = {
    a: "left",
    d: "right",
    w: "caudal",
    " ": "caudal",
};

export class FinKeyTracker {
    private held: Record<FinName, Set<string>> = {
        left: new Set(),
        right: new Set(),
        caudal: new Set(),
    };
    current: FinTriple = { left: false, right: false, caudal: false };

    /** Feed a key event; returns the new triple when it changed, else null. */
    keyEvent(key: string, down: boolean): FinTriple | null {
        const fin = KEY_TO_FIN[key.toLowerCase()];
        if (fin === undefined) {
            return null;
        }
        return this.setSource(fin, `key:${key.toLowerCase()}`, down);
    }

    /** Feed an on-screen button press/release for one fin. */
    buttonEvent(fin: FinName, down: boolean): FinTriple | null {
        return this.setSource(fin, "button", down);
    }

    /** Force everything off (window blur, disconnect). */
    releaseAll(): FinTriple | null {
        for (const fin of Object.keys(this.held) as FinName[]) {
            this.held[fin].clear();
        }
        return this.recompute();
    }

    private setSource(fin: FinName, source: string, down: boolean): FinTriple | null {
        if (down) {
            this.held[fin].add(source);
        } else {
            this.held[fin].delete(source);
        }
        return this.recompute();
    }

    private recompute(): FinTriple | null {
        const next: FinTriple = {
            left: this.held.left.size > 0,
            right: this.held.right.size > 0,
            caudal: this.held.caudal.size > 0,
        };
        if (sameFins(next, this.current)) {
            return null;
        }
        this.current = next;
        return next;
    }
}
