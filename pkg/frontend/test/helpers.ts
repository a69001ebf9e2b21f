// Shared test utilities: a seeded PRNG and random model edits.

import { DesignModel } from "../src/model.js";

export function mulberry32(seed: number): () => number {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) >>> 0;
        let t = a;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}

export function uniform(rand: () => number, lo: number, hi: number): number {
    return lo + (hi - lo) * rand();
}

// One random edit drawn from the user-visible gestures.
export function randomEdit(model: DesignModel, rand: () => number): void {
    const ids = model.gaussians.map((g) => g.id);
    const op = rand();
    if (ids.length === 0 || op < 0.3) {
        model.addAt(uniform(rand, 0, model.canvasWidth), uniform(rand, 0, model.canvasHeight));
        return;
    }
    const id = ids[Math.floor(rand() * ids.length)];
    if (op < 0.5) {
        model.moveBy(id, uniform(rand, -200, 200), uniform(rand, -200, 200));
    } else if (op < 0.65) {
        model.setAxis(id, rand() < 0.5 ? "a" : "b", uniform(rand, 0.5, 160));
    } else if (op < 0.8) {
        model.rotateTo(id, uniform(rand, -Math.PI, Math.PI));
    } else if (op < 0.92) {
        model.setWeight(id, uniform(rand, 0, 3));
    } else {
        model.remove(id);
    }
}

export function fuzzedModel(seed: number, edits: number, w = 512, h = 512): DesignModel {
    const rand = mulberry32(seed);
    const model = new DesignModel(w, h);
    for (let i = 0; i < edits; i++) randomEdit(model, rand);
    return model;
}
