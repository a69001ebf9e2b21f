// Page bootstrap: wires the model, the service client, and the canvas
// together. Everything stateful lives here; the imported modules stay pure.

import { ApiError, GazeForgeApi, debounce, formatResidual } from "./api.js";
import {
    DragState,
    paintOverlays,
    paintPreview,
    pointerDown,
    pointerMove,
    updateHover,
} from "./editor.js";
import { DesignModel } from "./model.js";
import { decodeSmapBase64 } from "./smap.js";

const CANVAS_W = 512;
const CANVAS_H = 512;
const SPEC_DEBOUNCE_MS = 150;

const api = new GazeForgeApi(
    new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8099",
);
const model = new DesignModel(CANVAS_W, CANVAS_H);

const canvas = document.getElementById("design-canvas") as HTMLCanvasElement;
const overlayBefore = document.getElementById("overlay-before") as HTMLCanvasElement;
const overlayAfter = document.getElementById("overlay-after") as HTMLCanvasElement;
const generated = document.getElementById("generated") as HTMLImageElement;
const promptInput = document.getElementById("prompt") as HTMLInputElement;
const correctButton = document.getElementById("correct") as HTMLButtonElement;
const applyButton = document.getElementById("apply") as HTMLButtonElement;
const generateButton = document.getElementById("generate") as HTMLButtonElement;
const residualBadge = document.getElementById("residual") as HTMLSpanElement;
const referenceLabel = document.getElementById("reference") as HTMLSpanElement;
const banner = document.getElementById("banner") as HTMLDivElement;

const ctx = canvas.getContext("2d")!;
let sessionId = "";
let lastPreviewB64: string | null = null;
let pendingCorrection: ReturnType<DesignModel["toSpec"]> | null = null;
let drag: DragState | null = null;

function showBanner(text: string): void {
    banner.textContent = text;
    banner.style.display = text ? "block" : "none";
}

async function refreshPreview(): Promise<void> {
    try {
        const b64 = await api.renderPreview(sessionId, CANVAS_W, CANVAS_H);
        if (b64 === null) return; // a newer render already landed
        lastPreviewB64 = b64;
        repaint();
    } catch (err) {
        showBanner(`render failed: ${(err as Error).message}`);
    }
}

function repaint(): void {
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, CANVAS_W, CANVAS_H);
    if (lastPreviewB64) {
        paintPreview(ctx, decodeSmapBase64(lastPreviewB64), CANVAS_W, CANVAS_H);
    }
    paintOverlays(ctx, model);
}

const pushSpec = debounce(async () => {
    try {
        await api.putSpec(sessionId, model.toSpec());
        model.markError(null);
        showBanner("");
        await refreshPreview();
    } catch (err) {
        if (err instanceof ApiError && err.field) {
            const at = err.field.match(/^gaussians\[(\d+)\]/);
            model.markError(at ? Number(at[1]) : null);
            repaint();
            showBanner(`rejected at ${err.field}: ${err.message}`);
        } else {
            showBanner(`spec update failed: ${(err as Error).message}`);
        }
    }
}, SPEC_DEBOUNCE_MS);

function modelChanged(): void {
    repaint();
    pushSpec();
}

canvas.addEventListener("pointerdown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * CANVAS_W;
    const y = ((ev.clientY - rect.top) / rect.height) * CANVAS_H;
    const result = pointerDown(model, x, y);
    drag = result.state;
    canvas.setPointerCapture(ev.pointerId);
    modelChanged();
});

canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * CANVAS_W;
    const y = ((ev.clientY - rect.top) / rect.height) * CANVAS_H;
    if (drag) {
        if (pointerMove(model, drag, x, y)) modelChanged();
    } else {
        updateHover(model, x, y);
        repaint();
    }
});

canvas.addEventListener("pointerup", () => {
    drag = null;
});

window.addEventListener("keydown", (ev) => {
    const selected = model.selected;
    if (ev.key === "Delete" && selected) {
        model.remove(selected.id);
        modelChanged();
    }
});

function paintSmapInto(target: HTMLCanvasElement, b64: string): void {
    const grid = decodeSmapBase64(b64);
    target.width = grid.width;
    target.height = grid.height;
    paintPreview(target.getContext("2d")!, grid, grid.width, grid.height);
}

correctButton.addEventListener("click", async () => {
    try {
        showBanner("");
        const result = await api.correct(sessionId, promptInput.value);
        if (result === null) return; // superseded by a newer correction
        residualBadge.textContent = formatResidual(result.residual);
        referenceLabel.textContent = result.referencePrompt;
        pendingCorrection = result.correctedSpec;
        if (lastPreviewB64) paintSmapInto(overlayBefore, lastPreviewB64);
        const beforeSpec = model.toSpec();
        model.replaceFrom(result.correctedSpec);
        const after = await api.renderPreview(sessionId, CANVAS_W, CANVAS_H);
        model.replaceFrom(beforeSpec);
        if (after) paintSmapInto(overlayAfter, after);
        applyButton.disabled = false;
    } catch (err) {
        showBanner(`correction failed: ${(err as Error).message}`);
    }
});

applyButton.addEventListener("click", () => {
    if (!pendingCorrection) return;
    model.replaceFrom(pendingCorrection);
    pendingCorrection = null;
    applyButton.disabled = true;
    modelChanged();
});

generateButton.addEventListener("click", async () => {
    try {
        showBanner("");
        if (!lastPreviewB64) await refreshPreview();
        if (!lastPreviewB64) return;
        const out = await api.generate(
            promptInput.value, lastPreviewB64, CANVAS_W, CANVAS_H,
        );
        generated.src = `data:image/png;base64,${out.imageB64}`;
    } catch (err) {
        showBanner(`generation failed: ${(err as Error).message}`);
    }
});

(async () => {
    try {
        sessionId = await api.createSession(promptInput.value);
        await api.putSpec(sessionId, model.toSpec());
        await refreshPreview();
        const health = await api.healthz();
        correctButton.disabled = !health.index.loaded;
        if (!health.index.loaded) {
            showBanner("service has no guidance index; correction disabled");
        }
    } catch (err) {
        showBanner(`cannot reach service: ${(err as Error).message}`);
    }
})();
