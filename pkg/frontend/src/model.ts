// Editable Gaussian-bump model behind the design canvas. Pure data and
// math: no DOM, no network, so every edit path is unit-testable.

export interface CanvasGaussian {
    id: number;
    // center in canvas pixels
    x: number;
    y: number;
    weight: number;
    // covariance as principal axis std-devs (px) plus orientation
    axisA: number; // major
    axisB: number; // minor
    angle: number; // radians, normalized to [0, pi)
    selected: boolean;
    hover: boolean;
    error: boolean; // server rejected this component's serialization
}

export interface MixtureSpecJson {
    canvas: { w: number; h: number };
    gaussians: { w: number; mu: [number, number]; sigma: [[number, number], [number, number]] }[];
}

export const DEFAULT_SIGMA_PX = 40;
export const MIN_AXIS_PX = 1;
export const MIN_WEIGHT = 0;

function normalizeAngle(angle: number): number {
    let a = angle % Math.PI;
    if (a < 0) a += Math.PI;
    return a;
}

let nextId = 1;

export class DesignModel {
    readonly canvasWidth: number;
    readonly canvasHeight: number;
    gaussians: CanvasGaussian[] = [];

    constructor(canvasWidth: number, canvasHeight: number) {
        this.canvasWidth = canvasWidth;
        this.canvasHeight = canvasHeight;
    }

    get selected(): CanvasGaussian | undefined {
        return this.gaussians.find((g) => g.selected);
    }

    selectOnly(id: number | null): void {
        for (const g of this.gaussians) g.selected = g.id === id;
    }

    // Mark the component a server 422 named (by its position in the
    // serialized spec); null clears all marks.
    markError(index: number | null): void {
        this.gaussians.forEach((g, i) => {
            g.error = index !== null && i === index;
        });
    }

    addAt(x: number, y: number, sigma: number = DEFAULT_SIGMA_PX): CanvasGaussian {
        const g: CanvasGaussian = {
            id: nextId++,
            x: this.clampX(x),
            y: this.clampY(y),
            weight: 1,
            axisA: sigma,
            axisB: sigma,
            angle: 0,
            selected: true,
            hover: false,
            error: false,
        };
        for (const other of this.gaussians) other.selected = false;
        this.gaussians.push(g);
        return g;
    }

    moveBy(id: number, dx: number, dy: number): void {
        const g = this.byId(id);
        g.x = this.clampX(g.x + dx);
        g.y = this.clampY(g.y + dy);
    }

    // Axis handles set principal std-devs directly; the pair stays ordered
    // (major >= minor) by swapping and rotating a quarter turn when crossed.
    setAxis(id: number, which: "a" | "b", length: number): void {
        const g = this.byId(id);
        const value = Math.max(MIN_AXIS_PX, length);
        if (which === "a") g.axisA = value;
        else g.axisB = value;
        if (g.axisB > g.axisA) {
            [g.axisA, g.axisB] = [g.axisB, g.axisA];
            g.angle = normalizeAngle(g.angle + Math.PI / 2);
        }
    }

    rotateTo(id: number, angle: number): void {
        this.byId(id).angle = normalizeAngle(angle);
    }

    setWeight(id: number, weight: number): void {
        this.byId(id).weight = Math.max(MIN_WEIGHT, weight);
    }

    remove(id: number): void {
        this.gaussians = this.gaussians.filter((g) => g.id !== id);
    }

    replaceFrom(spec: MixtureSpecJson): void {
        this.gaussians = spec.gaussians.map((item) => gaussianFromJson(item));
    }

    toSpec(): MixtureSpecJson {
        return {
            canvas: { w: this.canvasWidth, h: this.canvasHeight },
            gaussians: this.gaussians.map((g) => gaussianToJson(g)),
        };
    }

    private byId(id: number): CanvasGaussian {
        const g = this.gaussians.find((item) => item.id === id);
        if (!g) throw new Error(`no gaussian with id ${id}`);
        return g;
    }

    // Means may roam off-canvas but stay inside the bounded domain the
    // server accepts: [-w, 2w] x [-h, 2h].
    private clampX(x: number): number {
        return Math.min(Math.max(x, -this.canvasWidth), 2 * this.canvasWidth);
    }

    private clampY(y: number): number {
        return Math.min(Math.max(y, -this.canvasHeight), 2 * this.canvasHeight);
    }
}

// sigma = R(angle) diag(a^2, b^2) R(angle)^T, spelled out.
export function gaussianToJson(g: CanvasGaussian): MixtureSpecJson["gaussians"][number] {
    const c = Math.cos(g.angle);
    const s = Math.sin(g.angle);
    const a2 = g.axisA * g.axisA;
    const b2 = g.axisB * g.axisB;
    const sxx = a2 * c * c + b2 * s * s;
    const syy = a2 * s * s + b2 * c * c;
    const sxy = (a2 - b2) * s * c;
    return {
        w: g.weight,
        mu: [g.x, g.y],
        sigma: [
            [sxx, sxy],
            [sxy, syy],
        ],
    };
}

// Eigendecomposition of the symmetric 2x2 covariance back into axis form.
export function gaussianFromJson(item: MixtureSpecJson["gaussians"][number]): CanvasGaussian {
    const [[sxx, sxy], [, syy]] = item.sigma;
    const angle0 = 0.5 * Math.atan2(2 * sxy, sxx - syy);
    const c = Math.cos(angle0);
    const s = Math.sin(angle0);
    const lamA = sxx * c * c + 2 * sxy * s * c + syy * s * s;
    const lamB = sxx * s * s - 2 * sxy * s * c + syy * c * c;
    let axisA = Math.sqrt(Math.max(lamA, 0));
    let axisB = Math.sqrt(Math.max(lamB, 0));
    let angle = angle0;
    if (axisB > axisA) {
        [axisA, axisB] = [axisB, axisA];
        angle += Math.PI / 2;
    }
    if (Math.abs(axisA - axisB) < 1e-9) angle = 0; // isotropic: orientation is moot
    return {
        id: nextId++,
        x: item.mu[0],
        y: item.mu[1],
        weight: item.w,
        axisA,
        axisB,
        angle: normalizeAngle(angle),
        selected: false,
        hover: false,
        error: false,
    };
}

export function specsEqual(a: MixtureSpecJson, b: MixtureSpecJson, tol = 1e-6): boolean {
    if (a.canvas.w !== b.canvas.w || a.canvas.h !== b.canvas.h) return false;
    if (a.gaussians.length !== b.gaussians.length) return false;
    for (let i = 0; i < a.gaussians.length; i++) {
        const ga = a.gaussians[i];
        const gb = b.gaussians[i];
        const flat = (g: typeof ga) => [
            g.w, g.mu[0], g.mu[1],
            g.sigma[0][0], g.sigma[0][1], g.sigma[1][0], g.sigma[1][1],
        ];
        const fa = flat(ga);
        const fb = flat(gb);
        for (let j = 0; j < fa.length; j++) {
            const scale = Math.max(Math.abs(fa[j]), Math.abs(fb[j]), 1);
            if (Math.abs(fa[j] - fb[j]) > tol * scale) return false;
        }
    }
    return true;
}
