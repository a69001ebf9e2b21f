// Canvas interaction logic for the design surface. The pointer state
// machine and hit-testing are pure (testable without a DOM); painting takes
// a 2D context from the caller.

import { CanvasGaussian, DesignModel } from "./model.js";
import { SmapGrid, toGrayLevels } from "./smap.js";

export const HANDLE_HIT_RADIUS = 10;
export const BODY_HIT_SIGMA = 1.2; // clicks within 1.2 sigma select a bump
export const ROTATE_HANDLE_OFFSET = 24;

export type HandleKind = "axis-a" | "axis-b" | "rotate";

export interface HandleLayout {
    axisA: { x: number; y: number };
    axisB: { x: number; y: number };
    rotate: { x: number; y: number };
}

export function handleLayout(g: CanvasGaussian): HandleLayout {
    const ca = Math.cos(g.angle);
    const sa = Math.sin(g.angle);
    return {
        axisA: { x: g.x + ca * g.axisA, y: g.y + sa * g.axisA },
        axisB: { x: g.x - sa * g.axisB, y: g.y + ca * g.axisB },
        rotate: {
            x: g.x + ca * (g.axisA + ROTATE_HANDLE_OFFSET),
            y: g.y + sa * (g.axisA + ROTATE_HANDLE_OFFSET),
        },
    };
}

function dist(ax: number, ay: number, bx: number, by: number): number {
    return Math.hypot(ax - bx, ay - by);
}

// Mahalanobis distance of a point from a bump in axis coordinates.
export function bodyDistance(g: CanvasGaussian, x: number, y: number): number {
    const dx = x - g.x;
    const dy = y - g.y;
    const ca = Math.cos(g.angle);
    const sa = Math.sin(g.angle);
    const u = (dx * ca + dy * sa) / g.axisA;
    const v = (-dx * sa + dy * ca) / g.axisB;
    return Math.hypot(u, v);
}

export type Hit =
    | { kind: "handle"; id: number; handle: HandleKind }
    | { kind: "body"; id: number }
    | { kind: "empty" };

export function hitTest(model: DesignModel, x: number, y: number): Hit {
    const selected = model.selected;
    if (selected) {
        const layout = handleLayout(selected);
        const handles: [HandleKind, { x: number; y: number }][] = [
            ["rotate", layout.rotate],
            ["axis-a", layout.axisA],
            ["axis-b", layout.axisB],
        ];
        for (const [kind, pos] of handles) {
            if (dist(x, y, pos.x, pos.y) <= HANDLE_HIT_RADIUS) {
                return { kind: "handle", id: selected.id, handle: kind };
            }
        }
    }
    // nearest body wins; later additions sit on top
    let best: { id: number; d: number } | null = null;
    for (const g of model.gaussians) {
        const d = bodyDistance(g, x, y);
        if (d <= BODY_HIT_SIGMA && (!best || d < best.d)) {
            best = { id: g.id, d };
        }
    }
    return best ? { kind: "body", id: best.id } : { kind: "empty" };
}

export interface DragState {
    hit: Hit;
    lastX: number;
    lastY: number;
    moved: boolean;
}

// Pointer-down decides the gesture; empty space adds a bump immediately
// (the click-to-add behavior), a body starts a move, a handle starts a
// resize/rotate. Returns whether the model changed.
export function pointerDown(model: DesignModel, x: number, y: number): {
    state: DragState;
    changed: boolean;
} {
    const hit = hitTest(model, x, y);
    if (hit.kind === "empty") {
        model.addAt(x, y);
        return { state: { hit: { kind: "body", id: model.selected!.id }, lastX: x, lastY: y, moved: false }, changed: true };
    }
    if (hit.kind === "body") {
        model.selectOnly(hit.id);
    }
    return { state: { hit, lastX: x, lastY: y, moved: false }, changed: hit.kind === "body" };
}

export function pointerMove(model: DesignModel, state: DragState, x: number, y: number): boolean {
    const hit = state.hit;
    if (hit.kind === "empty") return false;
    const g = model.gaussians.find((item) => item.id === hit.id);
    if (!g) return false;
    let changed = false;
    if (hit.kind === "body") {
        if (x !== state.lastX || y !== state.lastY) {
            model.moveBy(g.id, x - state.lastX, y - state.lastY);
            changed = true;
        }
    } else if (hit.handle === "axis-a" || hit.handle === "axis-b") {
        model.setAxis(g.id, hit.handle === "axis-a" ? "a" : "b", dist(x, y, g.x, g.y));
        changed = true;
    } else {
        model.rotateTo(g.id, Math.atan2(y - g.y, x - g.x));
        changed = true;
    }
    state.lastX = x;
    state.lastY = y;
    state.moved = state.moved || changed;
    return changed;
}

export function updateHover(model: DesignModel, x: number, y: number): void {
    const hit = hitTest(model, x, y);
    for (const g of model.gaussians) {
        g.hover = hit.kind === "body" && hit.id === g.id;
    }
}

// -- painting ---------------------------------------------------------------

export function paintPreview(
    ctx: CanvasRenderingContext2D,
    grid: SmapGrid,
    targetWidth: number,
    targetHeight: number,
): void {
    const gray = toGrayLevels(grid);
    const image = ctx.createImageData(grid.width, grid.height);
    for (let i = 0; i < gray.length; i++) {
        image.data[4 * i] = gray[i];
        image.data[4 * i + 1] = gray[i];
        image.data[4 * i + 2] = gray[i];
        image.data[4 * i + 3] = 255;
    }
    ctx.putImageData(image, 0, 0);
    if (grid.width !== targetWidth || grid.height !== targetHeight) {
        ctx.imageSmoothingEnabled = true;
        ctx.drawImage(ctx.canvas, 0, 0, grid.width, grid.height, 0, 0, targetWidth, targetHeight);
    }
}

export function paintOverlays(ctx: CanvasRenderingContext2D, model: DesignModel): void {
    for (const g of model.gaussians) {
        ctx.save();
        ctx.translate(g.x, g.y);
        ctx.rotate(g.angle);
        ctx.strokeStyle = g.error
            ? "#ef5350"
            : g.selected
              ? "#4fc3f7"
              : g.hover
                ? "#90caf9"
                : "#78909c";
        ctx.lineWidth = g.selected || g.error ? 2 : 1;
        ctx.beginPath();
        ctx.ellipse(0, 0, g.axisA, g.axisB, 0, 0, 2 * Math.PI);
        ctx.stroke();
        ctx.restore();
        if (g.selected) {
            const layout = handleLayout(g);
            for (const pos of [layout.axisA, layout.axisB]) {
                ctx.fillStyle = "#4fc3f7";
                ctx.beginPath();
                ctx.arc(pos.x, pos.y, 4, 0, 2 * Math.PI);
                ctx.fill();
            }
            ctx.strokeStyle = "#ffb74d";
            ctx.beginPath();
            ctx.arc(layout.rotate.x, layout.rotate.y, 5, 0, 2 * Math.PI);
            ctx.stroke();
        }
    }
}
