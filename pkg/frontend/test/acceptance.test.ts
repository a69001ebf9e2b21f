// UI acceptance against a real service: fuzzed canvas edits must serialize
// to specs the server accepts, the painted preview must stay within one
// gray level of the server's render, and the residual badge must stay
// within 1% of the reported value.

import assert from "node:assert/strict";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { GazeForgeApi, formatResidual } from "../src/api.js";
import { DesignModel, specsEqual } from "../src/model.js";
import { decodeSmapBase64, encodeSmapBase64, toGrayLevels } from "../src/smap.js";
import { fuzzedModel, mulberry32, uniform } from "./helpers.js";

let service: ChildProcess | null = null;
let api: GazeForgeApi;

function smapBytes(width: number, height: number, values: Float32Array): Buffer {
    return Buffer.from(encodeSmapBase64({ width, height, values }), "base64");
}

function gaussianField(width: number, height: number, cx: number, cy: number, sigma: number): Float32Array {
    const values = new Float32Array(width * height);
    for (let y = 0; y < height; y++) {
        for (let x = 0; x < width; x++) {
            const d2 = (x - cx) ** 2 + (y - cy) ** 2;
            values[y * width + x] = Math.exp(-d2 / (2 * sigma * sigma));
        }
    }
    return values;
}

before(async () => {
    const dir = mkdtempSync(join(tmpdir(), "gazeforge-ui-"));

    // Toy guidance corpus ingested through the real CLI.
    const prompts = ["a red fox in a snowy field", "harbor at dawn"];
    const manifest: string[] = [];
    prompts.forEach((prompt, i) => {
        const field = gaussianField(96, 96, 30 + 30 * i, 48, 14);
        writeFileSync(join(dir, `${i}.smap`), smapBytes(96, 96, field));
        manifest.push(JSON.stringify({ prompt, map: `${i}.smap` }));
    });
    writeFileSync(join(dir, "pairs.jsonl"), manifest.join("\n") + "\n");
    const ingest = spawnSync(
        "python3",
        ["-m", "gazeforge.cli", "ingest", "--manifest", join(dir, "pairs.jsonl"),
         "--embedder", "hashed-512", "--out", join(dir, "idx")],
        { encoding: "utf-8", timeout: 120_000 },
    );
    assert.equal(ingest.status, 0, ingest.stderr);

    service = spawn(
        "python3",
        ["-m", "gazeforge.cli", "serve", "--port", "0",
         "--index", join(dir, "idx"), "--data-dir", join(dir, "state")],
        { stdio: ["ignore", "pipe", "pipe"] },
    );
    const port = await new Promise<number>((resolve, reject) => {
        let buffer = "";
        const timer = setTimeout(() => reject(new Error(`service never announced a port: ${buffer}`)), 60_000);
        service!.stdout!.on("data", (chunk: Buffer) => {
            buffer += chunk.toString();
            const match = buffer.match(/on http:\/\/[^:]+:(\d+)/);
            if (match) {
                clearTimeout(timer);
                resolve(Number(match[1]));
            }
        });
        service!.on("exit", (code) => reject(new Error(`service exited early (${code})`)));
    });
    api = new GazeForgeApi(`http://127.0.0.1:${port}`);
});

after(() => {
    service?.kill();
});

test("200 fuzzed edit sequences serialize to server-accepted specs", async () => {
    const sessionId = await api.createSession("fuzz");
    let rejections = 0;
    for (let seed = 0; seed < 200; seed++) {
        const model = fuzzedModel(1000 + seed, 1 + (seed % 14));
        try {
            await api.putSpec(sessionId, model.toSpec());
        } catch (err) {
            rejections++;
            console.error(`seed ${seed} rejected: ${(err as Error).message}`);
            continue;
        }
        const echoed = await api.getSpec(sessionId);
        assert.ok(specsEqual(model.toSpec(), echoed), `seed ${seed}: server echoed a different spec`);
    }
    assert.equal(rejections, 0);
});

test("preview raster matches the server render within 1/255 per pixel", async () => {
    const sessionId = await api.createSession("preview");
    const rand = mulberry32(424242);
    for (let trial = 0; trial < 5; trial++) {
        const model = new DesignModel(512, 512);
        const bumps = 1 + Math.floor(rand() * 3);
        for (let i = 0; i < bumps; i++) {
            const g = model.addAt(uniform(rand, 60, 450), uniform(rand, 60, 450));
            model.setAxis(g.id, "a", uniform(rand, 20, 90));
            model.setWeight(g.id, uniform(rand, 0.4, 1.6));
        }
        await api.putSpec(sessionId, model.toSpec());
        const b64 = await api.renderPreview(sessionId, 96, 96);
        assert.ok(b64);
        const grid = decodeSmapBase64(b64!);
        const gray = toGrayLevels(grid);
        let max = 0;
        for (const v of grid.values) max = Math.max(max, v);
        assert.ok(max > 0);
        for (let i = 0; i < grid.values.length; i++) {
            const painted = gray[i] / 255;
            const server = grid.values[i] / max;
            assert.ok(
                Math.abs(painted - server) <= 1 / 255 + 1e-9,
                `pixel ${i}: painted ${painted} vs server ${server}`,
            );
        }
    }
});

test("residual badge stays within 1% of the API-reported residual", async () => {
    const sessionId = await api.createSession("a red fox in a snowy field");
    const model = new DesignModel(512, 512);
    const g = model.addAt(180, 260);
    model.setAxis(g.id, "a", 75);
    await api.putSpec(sessionId, model.toSpec());
    const result = await api.correct(sessionId, "a red fox in a snowy field");
    assert.ok(result);
    assert.equal(result!.referencePrompt, "a red fox in a snowy field");
    const shown = Number(formatResidual(result!.residual));
    if (result!.residual === 0) {
        assert.equal(shown, 0);
    } else {
        assert.ok(Math.abs(shown - result!.residual) / result!.residual <= 0.01);
    }
    // The corrected spec is itself a valid session spec (apply works).
    await api.putSpec(sessionId, result!.correctedSpec);
});
