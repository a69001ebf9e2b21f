import assert from "node:assert/strict";
import { test } from "node:test";

import {
    bodyDistance,
    handleLayout,
    hitTest,
    pointerDown,
    pointerMove,
    updateHover,
} from "../src/editor.js";
import { DesignModel } from "../src/model.js";

test("empty-canvas click adds and selects a bump", () => {
    const model = new DesignModel(512, 512);
    const { changed } = pointerDown(model, 200, 150);
    assert.ok(changed);
    assert.equal(model.gaussians.length, 1);
    assert.equal(model.selected?.x, 200);
});

test("dragging a body moves it by the pointer delta", () => {
    const model = new DesignModel(512, 512);
    const g = model.addAt(100, 100);
    const { state } = pointerDown(model, 100, 100);
    pointerMove(model, state, 112, 95);
    assert.equal(g.x, 112);
    assert.equal(g.y, 95);
});

test("axis handle drag sets the principal std-dev", () => {
    const model = new DesignModel(512, 512);
    const g = model.addAt(100, 100);
    const layout = handleLayout(g);
    const { state } = pointerDown(model, layout.axisA.x, layout.axisA.y);
    assert.equal(state.hit.kind, "handle");
    pointerMove(model, state, 100 + 70, 100);
    assert.ok(Math.abs(g.axisA - 70) < 1e-9);
});

test("rotate handle drag orients the bump toward the pointer", () => {
    const model = new DesignModel(512, 512);
    const g = model.addAt(100, 100);
    model.setAxis(g.id, "a", 60); // anisotropic so rotation is meaningful
    const layout = handleLayout(g);
    const { state } = pointerDown(model, layout.rotate.x, layout.rotate.y);
    assert.equal(state.hit.kind, "handle");
    pointerMove(model, state, 100, 180); // straight down
    assert.ok(Math.abs(g.angle - Math.PI / 2) < 1e-9);
});

test("hit test prefers handles of the selection over bodies", () => {
    const model = new DesignModel(512, 512);
    const a = model.addAt(100, 100);
    model.addAt(160, 100);
    model.selectOnly(a.id);
    const layout = handleLayout(a);
    const hit = hitTest(model, layout.axisA.x, layout.axisA.y);
    assert.deepEqual(hit, { kind: "handle", id: a.id, handle: "axis-a" });
});

test("body distance is in axis units", () => {
    const model = new DesignModel(512, 512);
    const g = model.addAt(0, 0);
    model.setAxis(g.id, "a", 50);
    model.setAxis(g.id, "b", 10);
    assert.ok(Math.abs(bodyDistance(g, 50, 0) - 1) < 1e-9);
    assert.ok(Math.abs(bodyDistance(g, 0, 10) - 1) < 1e-9);
});

test("hover tracks the bump under the pointer", () => {
    const model = new DesignModel(512, 512);
    const a = model.addAt(100, 100);
    const b = model.addAt(300, 300);
    model.selectOnly(null);
    updateHover(model, 102, 99);
    assert.ok(a.hover);
    assert.ok(!b.hover);
    updateHover(model, 400, 50);
    assert.ok(!a.hover && !b.hover);
});
