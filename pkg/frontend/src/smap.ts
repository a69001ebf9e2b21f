// Decoding of the SMAP raster payloads the service returns (base64 inside
// JSON) and the display-only grayscale quantization. This is the one place
// the UI touches saliency values, and only to paint them.

export interface SmapGrid {
    width: number;
    height: number;
    values: Float32Array; // row-major
}

const SMAP_MAGIC = 0x50414d53; // "SMAP" little-endian

export function decodeSmapBase64(b64: string): SmapGrid {
    const raw = base64ToBytes(b64);
    const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
    if (raw.byteLength < 16 || view.getUint32(0, true) !== SMAP_MAGIC) {
        throw new Error("not an SMAP payload");
    }
    const version = view.getUint32(4, true);
    if (version !== 1) throw new Error(`unsupported SMAP version ${version}`);
    const width = view.getUint32(8, true);
    const height = view.getUint32(12, true);
    const expected = 16 + 4 * width * height;
    if (raw.byteLength !== expected) {
        throw new Error(`SMAP length ${raw.byteLength}, expected ${expected}`);
    }
    const values = new Float32Array(width * height);
    for (let i = 0; i < values.length; i++) {
        values[i] = view.getFloat32(16 + 4 * i, true);
    }
    return { width, height, values };
}

export function encodeSmapBase64(grid: SmapGrid): string {
    const bytes = new Uint8Array(16 + 4 * grid.values.length);
    const view = new DataView(bytes.buffer);
    view.setUint32(0, SMAP_MAGIC, true);
    view.setUint32(4, 1, true);
    view.setUint32(8, grid.width, true);
    view.setUint32(12, grid.height, true);
    for (let i = 0; i < grid.values.length; i++) {
        view.setFloat32(16 + 4 * i, grid.values[i], true);
    }
    return bytesToBase64(bytes);
}

// Grayscale levels for painting: each pixel rounds to the nearest of 256
// levels of value/max, so the painted intensity differs from the server's
// float by at most 1/510 of the peak.
export function toGrayLevels(grid: SmapGrid): Uint8ClampedArray {
    let max = 0;
    for (const v of grid.values) max = Math.max(max, v);
    const out = new Uint8ClampedArray(grid.values.length);
    if (max <= 0) return out;
    for (let i = 0; i < grid.values.length; i++) {
        out[i] = Math.round((grid.values[i] / max) * 255);
    }
    return out;
}

export function base64ToBytes(b64: string): Uint8Array {
    if (typeof atob === "function") {
        const bin = atob(b64);
        const out = new Uint8Array(bin.length);
        for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
        return out;
    }
    return new Uint8Array(Buffer.from(b64, "base64"));
}

export function bytesToBase64(bytes: Uint8Array): string {
    if (typeof btoa === "function") {
        let bin = "";
        for (const b of bytes) bin += String.fromCharCode(b);
        return btoa(bin);
    }
    return Buffer.from(bytes).toString("base64");
}
