"""Interactive design correction: retrieve the nearest reference saliency for
a prompt, then align the authored Gaussian mixture to it.

The alignment optimizes an image-space transform T (translation, rotation,
uniform scale about the canvas center), per-component weights and
per-component isotropic covariance scale factors, minimizing the pixel-sum
squared difference between the transformed rendering and the reference.
Means stay rigid under T by default so the authored layout survives; a
free-means mode releases them under a layout-preservation regularizer.

Rotation makes the objective non-convex, so the search multi-starts at
0, +-pi/2 and pi, descending with analytic gradients (L-BFGS-B) and reducing
to the lowest residual (ties: lowest start index). Residuals are reported
with both maps scaled by 1/max(reference), so thresholds are comparable
across reference intensities; the scaling is a constant factor and does not
move the optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as _sciopt

from .errors import (
    DegenerateMapError,
    IndexMismatchError,
    InvalidArgumentsError,
)
from .index import GuidanceIndex, scan
from .maps import SaliencyMap, resample_map
from .mixture import MAHALANOBIS_CLAMP, Gaussian2D, GaussianMixtureSpec, render_mixture
from .transform import Transform2D, transform_mixture

__all__ = [
    "CorrectionOptions",
    "CorrectionResult",
    "retrieve_reference",
    "objective",
    "correct",
    "correct_to_reference",
    "author_suppression",
    "point_in_polygon",
    "polygon_mask",
]

ROTATION_STARTS = (0.0, math.pi / 2.0, -math.pi / 2.0, math.pi)


class _IdentityResult:
    """Minimal stand-in for an OptimizeResult at the identity start point."""

    def __init__(self, x, fun):
        self.x = x
        self.fun = fun
        self.nit = 0
        self.status = 0


@dataclass
class CorrectionOptions:
    """Knobs for :func:`correct`. JSON keys use the wire names
    (maxIterations, tol, freeMeans, lambda, seed)."""

    max_iterations: int = 500
    tol: float = 1e-8
    free_means: bool = False
    lam: float = 0.1  # layout-regularizer multiplier, scaled by mean ref value^2
    seed: int = 0
    resolution_cap: int = 128
    early_stop_rel: float = 1e-8  # residual / sum(ref^2) below which later starts are skipped

    def to_dict(self) -> dict:
        return {
            "maxIterations": self.max_iterations,
            "tol": self.tol,
            "freeMeans": self.free_means,
            "lambda": self.lam,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorrectionOptions":
        opts = cls()
        if "maxIterations" in data:
            opts.max_iterations = int(data["maxIterations"])
        if "tol" in data:
            opts.tol = float(data["tol"])
        if "freeMeans" in data:
            opts.free_means = bool(data["freeMeans"])
        if "lambda" in data:
            opts.lam = float(data["lambda"])
        if "seed" in data:
            opts.seed = int(data["seed"])
        if "resolutionCap" in data:
            opts.resolution_cap = int(data["resolutionCap"])
        return opts


@dataclass
class CorrectionResult:
    transform: Transform2D
    corrected_spec: GaussianMixtureSpec
    reference_prompt: str
    reference_map: SaliencyMap
    residual: float
    iterations: int
    converged: bool = True
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .mixture import mixture_to_dict

        return {
            "transform": self.transform.to_dict(),
            "correctedSpec": mixture_to_dict(self.corrected_spec),
            "referencePrompt": self.reference_prompt,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "metadata": self.metadata,
        }


def retrieve_reference(prompt: str, index: GuidanceIndex, embedder):
    """Nearest dataset record to the prompt in embedding space.

    Returns ``(reference_prompt, reference_map)``; exact scan, ties broken
    by lowest record id.
    """
    p, m, _ = _retrieve(prompt, index, embedder)
    return p, m


def _retrieve(prompt: str, index: GuidanceIndex, embedder):
    if embedder.embedder_id != index.embedder_id:
        raise IndexMismatchError(
            f"embedder {embedder.embedder_id!r} != index embedder {index.embedder_id!r}"
        )
    ranked = scan(index, embedder.embed(prompt))
    best = int(ranked[0])
    record = index.record(best)
    return record.prompt, index.load_map(best), best


def objective(
    spec: GaussianMixtureSpec, transform: Transform2D, reference: SaliencyMap
) -> float:
    """Raw pixel-sum squared L2 between the transformed rendering and the
    reference, evaluated on the reference grid (mixture coordinates are taken
    to live in reference pixel space; :func:`correct` rescales for you)."""
    rendered = render_mixture(
        transform_mixture(spec, transform), reference.width, reference.height
    )
    diff = rendered.values - reference.values
    return float((diff * diff).sum())


# --------------------------------------------------------------------------
# Optimizer core
# --------------------------------------------------------------------------


class _AlignmentProblem:
    """Objective + analytic gradient over x = [tx, ty, theta, s, w_i.., c_i..,
    (mx_i, my_i..)] at a fixed working resolution.

    ``cscale_penalty`` adds a tiny pull of the per-component covariance
    scales toward 1. For a single component the global scale and its
    covariance scale act identically on the rendering (translation absorbs
    the mean shift), so the data term alone cannot split them; the penalty
    resolves that flat direction toward expressing scale in the transform,
    and is orders of magnitude below the data term whenever the reference
    genuinely calls for reshaped covariances.
    """

    def __init__(self, spec, ref_values, pivot, kappa, free_means, reg_lambda,
                 cscale_penalty=0.0):
        self.n = len(spec.components)
        self.free_means = free_means
        self.reg_lambda = reg_lambda
        self.cscale_penalty = cscale_penalty
        self.pivot = np.asarray(pivot, dtype=np.float64)
        self.m0 = np.array([g.mean for g in spec.components]) - self.pivot  # (N, 2)
        self.cov0 = np.array([g.cov for g in spec.components])  # (N, 2, 2)
        self.w0 = np.array([g.weight for g in spec.components])
        h, w = ref_values.shape
        gx, gy = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
        self.px = gx.ravel()
        self.py = gy.ravel()
        self.ref = ref_values.ravel()
        self.kappa = kappa

    def initial_params(self, theta0: float, t0=(0.0, 0.0)) -> np.ndarray:
        x = np.concatenate(
            [[t0[0], t0[1], theta0, 1.0], self.w0, np.ones(self.n)]
        )
        if self.free_means:
            c, s = math.cos(theta0), math.sin(theta0)
            rot = np.array([[c, -s], [s, c]])
            means = self.m0 @ rot.T + self.pivot + np.asarray(t0)
            x = np.concatenate([x, means.ravel()])
        return x

    def centroid_shift(self) -> tuple:
        """Translation aligning the untransformed rendering's mass centroid
        with the reference's; a cheap high-quality first start."""
        render = np.zeros_like(self.ref)
        for i in range(self.n):
            a = self.cov0[i]
            det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            binv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
            qx = self.px - (self.m0[i, 0] + self.pivot[0])
            qy = self.py - (self.m0[i, 1] + self.pivot[1])
            qbq = (
                binv[0, 0] * qx * qx + 2.0 * binv[0, 1] * qx * qy + binv[1, 1] * qy * qy
            )
            np.minimum(qbq, MAHALANOBIS_CLAMP, out=qbq)
            render += self.w0[i] * np.exp(-0.5 * qbq)
        rmass = render.sum()
        fmass = self.ref.sum()
        if rmass <= 0 or fmass <= 0:
            return (0.0, 0.0)
        return (
            float((self.px * self.ref).sum() / fmass - (self.px * render).sum() / rmass),
            float((self.py * self.ref).sum() / fmass - (self.py * render).sum() / rmass),
        )

    def bounds(self, width, height):
        span = 0.75 * max(width, height)
        b = [(-span, span), (-span, span), (None, None), (0.05, 20.0)]
        b += [(0.0, None)] * self.n  # weights
        if self.n == 1:
            # With one component the covariance scale is exactly redundant
            # with the transform scale (translation absorbs the mean shift);
            # freeze it so s is identified.
            b += [(1.0, 1.0)]
        else:
            b += [(0.05, 20.0)] * self.n  # covariance scales
        if self.free_means:
            for _ in range(self.n):
                b += [(-float(width), 2.0 * width), (-float(height), 2.0 * height)]
        return b

    def unpack(self, x):
        n = self.n
        t = x[0:2]
        theta = x[2]
        s = x[3]
        weights = x[4 : 4 + n]
        cscales = x[4 + n : 4 + 2 * n]
        means = None
        if self.free_means:
            means = x[4 + 2 * n : 4 + 4 * n].reshape(n, 2)
        return t, theta, s, weights, cscales, means

    def value_and_grad(self, x):
        t, theta, s, weights, cscales, free_mu = self.unpack(x)
        n = self.n
        cth, sth = math.cos(theta), math.sin(theta)
        rot = np.array([[cth, -sth], [sth, cth]])
        drot = np.array([[-sth, -cth], [cth, -sth]])

        rigid_mu = self.m0 @ rot.T * s + self.pivot + t  # (N, 2)
        mu = free_mu if self.free_means else rigid_mu

        render = np.zeros_like(self.ref)
        per = []
        for i in range(n):
            a = (cscales[i] * s) ** 2 * (rot @ self.cov0[i] @ rot.T)
            det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            binv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
            qx = self.px - mu[i, 0]
            qy = self.py - mu[i, 1]
            ux = binv[0, 0] * qx + binv[0, 1] * qy
            uy = binv[1, 0] * qx + binv[1, 1] * qy
            qbq = qx * ux + qy * uy
            np.minimum(qbq, MAHALANOBIS_CLAMP, out=qbq)
            e = np.exp(-0.5 * qbq)
            render += weights[i] * e
            per.append((ux, uy, qbq, e))
        err = render - self.ref
        f = self.kappa * float(err @ err)
        common = (2.0 * self.kappa) * err

        grad = np.zeros_like(x)
        for i in range(n):
            ux, uy, qbq, e = per[i]
            g = weights[i] * e
            cg = common * g
            sum_ux = float(cg @ ux)
            sum_uy = float(cg @ uy)
            sum_qbq = float(cg @ qbq)
            grad[4 + i] = float(common @ e)  # d/dw_i
            grad[4 + n + i] = sum_qbq / cscales[i]  # d/dc_i

            # Covariance rotation term: 0.5 * u^T dA u with dA = c^2 s^2 (R' C R^T + R C R'^T)
            cmat = (cscales[i] * s) ** 2 * self.cov0[i]
            dth = drot @ cmat @ rot.T
            dth = dth + dth.T
            quad_theta = 0.5 * float(
                cg @ (dth[0, 0] * ux * ux + 2.0 * dth[0, 1] * ux * uy + dth[1, 1] * uy * uy)
            )
            grad[2] += quad_theta
            grad[3] += sum_qbq / s  # dA/ds part

            if self.free_means:
                mi = 4 + 2 * n + 2 * i
                grad[mi] += sum_ux
                grad[mi + 1] += sum_uy
            else:
                grad[0] += sum_ux
                grad[1] += sum_uy
                dmdth = s * (drot @ self.m0[i])
                dmds = rot @ self.m0[i]
                grad[2] += sum_ux * dmdth[0] + sum_uy * dmdth[1]
                grad[3] += sum_ux * dmds[0] + sum_uy * dmds[1]

        if self.cscale_penalty > 0:
            dc = cscales - 1.0
            f += self.cscale_penalty * float(dc @ dc)
            grad[4 + n : 4 + 2 * n] += 2.0 * self.cscale_penalty * dc

        if self.free_means and self.reg_lambda > 0:
            delta = free_mu - rigid_mu  # (N, 2)
            f += self.reg_lambda * float((delta * delta).sum())
            for i in range(n):
                mi = 4 + 2 * n + 2 * i
                grad[mi] += 2.0 * self.reg_lambda * delta[i, 0]
                grad[mi + 1] += 2.0 * self.reg_lambda * delta[i, 1]
                grad[0] -= 2.0 * self.reg_lambda * delta[i, 0]
                grad[1] -= 2.0 * self.reg_lambda * delta[i, 1]
                dmdth = s * (drot @ self.m0[i])
                dmds = rot @ self.m0[i]
                grad[2] -= 2.0 * self.reg_lambda * float(delta[i] @ dmdth)
                grad[3] -= 2.0 * self.reg_lambda * float(delta[i] @ dmds)
        return f, grad


def _working_frame(spec: GaussianMixtureSpec, cap: int):
    """Uniformly shrink the canvas so its long side fits the resolution cap."""
    k = min(1.0, cap / max(spec.canvas_width, spec.canvas_height))
    w = max(1, int(round(spec.canvas_width * k)))
    h = max(1, int(round(spec.canvas_height * k)))
    kx = w / spec.canvas_width
    ky = h / spec.canvas_height
    if kx == 1.0 and ky == 1.0:
        return spec, w, h, kx, ky
    scale = np.diag([kx, ky])
    comps = tuple(
        Gaussian2D(
            weight=g.weight,
            mean=(g.mean[0] * kx, g.mean[1] * ky),
            cov=scale @ g.cov @ scale.T,
        )
        for g in spec.components
    )
    return (
        GaussianMixtureSpec(canvas_width=w, canvas_height=h, components=comps),
        w,
        h,
        kx,
        ky,
    )


def correct_to_reference(
    spec: GaussianMixtureSpec,
    reference: SaliencyMap,
    reference_prompt: str = "",
    opts: CorrectionOptions | None = None,
) -> CorrectionResult:
    """Align a mixture to a given reference map (the optimization half of
    :func:`correct`, usable directly when the reference is already in hand).
    """
    opts = opts or CorrectionOptions()
    if len(spec) == 0:
        raise InvalidArgumentsError("correction needs at least one mixture component")
    ref_peak = float(reference.values.max())
    if ref_peak <= 0:
        raise DegenerateMapError("reference map has no positive mass")

    work_spec, w, h, kx, ky = _working_frame(spec, opts.resolution_cap)
    ref_work = resample_map(reference, w, h)
    kappa = 1.0 / (ref_peak * ref_peak)
    ref_energy = kappa * float((ref_work.values**2).sum())
    reg_lambda = opts.lam * float(ref_work.values.mean() / ref_peak) ** 2 if opts.free_means else 0.0

    problem = _AlignmentProblem(
        work_spec,
        ref_work.values,
        (w / 2.0, h / 2.0),
        kappa,
        opts.free_means,
        reg_lambda,
        cscale_penalty=1e-6 * ref_energy,
    )
    bounds = problem.bounds(w, h)

    centroid_t = problem.centroid_shift()
    starts = [(0.0, centroid_t)] + [(theta0, (0.0, 0.0)) for theta0 in ROTATION_STARTS]
    best = None
    starts_meta = []
    for start_idx, (theta0, t0) in enumerate(starts):
        x0 = problem.initial_params(theta0, t0)
        res = _sciopt.minimize(
            problem.value_and_grad,
            x0,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={
                "maxiter": opts.max_iterations,
                "ftol": opts.tol,
                "gtol": 1e-12,
            },
        )
        starts_meta.append(
            {"theta0": theta0, "residual": float(res.fun), "iterations": int(res.nit)}
        )
        if best is None or res.fun < best[1].fun:
            best = (start_idx, res)
        if res.fun <= opts.early_stop_rel * ref_energy:
            break

    # Never return anything worse than the untouched spec under the identity
    # transform (descent guarantees this for the identity start, but early
    # stopping may skip it).
    x_id = problem.initial_params(0.0)
    f_id, _ = problem.value_and_grad(x_id)
    if f_id < best[1].fun:
        best = (len(starts), _IdentityResult(x_id, f_id))

    start_idx, res = best
    t, theta, s, weights, cscales, free_mu = problem.unpack(res.x)
    # Reported residual is the pure data term; tie-break and layout penalties
    # only steer the search.
    data_problem = _AlignmentProblem(
        work_spec, ref_work.values, (w / 2.0, h / 2.0), kappa, opts.free_means, 0.0
    )
    data_residual = float(data_problem.value_and_grad(res.x)[0])

    # Map the working-frame transform back to canvas coordinates. The frame
    # shrink is uniform up to integer rounding of the working dims, so theta
    # and s carry over; translations rescale per axis.
    pivot_canvas = (spec.canvas_width / 2.0, spec.canvas_height / 2.0)
    transform = Transform2D(
        tx=float(t[0]) / kx,
        ty=float(t[1]) / ky,
        theta=float(theta),
        scale=float(s),
        pivot=pivot_canvas,
    )

    rot = transform.rotation_matrix
    comps = []
    box_clamped = False
    for i, g in enumerate(spec.components):
        if opts.free_means and free_mu is not None:
            mean = (float(free_mu[i, 0]) / kx, float(free_mu[i, 1]) / ky)
        else:
            mean = transform.apply_point(*g.mean)
        cw, ch = spec.canvas_width, spec.canvas_height
        clamped = (
            min(max(mean[0], -cw), 2.0 * cw),
            min(max(mean[1], -ch), 2.0 * ch),
        )
        if clamped != mean:
            box_clamped = True
        cov = (cscales[i] * s) ** 2 * (rot @ g.cov @ rot.T)
        comps.append(Gaussian2D(weight=float(weights[i]), mean=clamped, cov=cov))
    corrected = GaussianMixtureSpec(
        canvas_width=spec.canvas_width,
        canvas_height=spec.canvas_height,
        components=tuple(comps),
    )

    metadata = {
        "normalization": "ref-max",
        "objective": "pixel-sum-L2",
        "workingDims": [w, h],
        "startIndex": start_idx,
        "starts": starts_meta,
        "seed": opts.seed,
        "freeMeans": opts.free_means,
    }
    if box_clamped:
        metadata["meansClampedToCanvasDomain"] = True
    return CorrectionResult(
        transform=transform,
        corrected_spec=corrected,
        reference_prompt=reference_prompt,
        reference_map=reference,
        residual=data_residual,
        iterations=int(res.nit),
        converged=bool(res.status == 0),
        metadata=metadata,
    )


def correct(
    spec: GaussianMixtureSpec,
    prompt: str,
    index: GuidanceIndex,
    embedder,
    opts: CorrectionOptions | None = None,
) -> CorrectionResult:
    """Retrieve the nearest reference for the prompt and align the mixture to
    it. Deterministic for fixed inputs and options."""
    ref_prompt, ref_map, ref_id = _retrieve(prompt, index, embedder)
    result = correct_to_reference(spec, ref_map, ref_prompt, opts)
    result.metadata["referenceId"] = ref_id
    return result


# --------------------------------------------------------------------------
# Attention suppression presets
# --------------------------------------------------------------------------


def point_in_polygon(x: float, y: float, polygon) -> bool:
    """Even-odd rule; polygon is a sequence of (x, y) vertices."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            cross_x = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < cross_x:
                inside = not inside
    return inside


def polygon_mask(width: int, height: int, polygon) -> np.ndarray:
    """Boolean raster of pixel centers inside the polygon (even-odd rule)."""
    gx, gy = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    inside = np.zeros((height, width), dtype=bool)
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 > gy) != (y2 > gy)
        cross_x = x1 + (gy - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (gx < cross_x)
    return inside


def _polygon_area(polygon) -> float:
    area = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def _ellipse_overlap_fraction(g: Gaussian2D, polygon, samples: int = 24) -> float:
    """Fraction of the 2-sigma ellipse area inside the polygon, via a
    deterministic grid over the unit disk."""
    chol = np.linalg.cholesky(g.cov)
    ticks = (np.arange(samples) + 0.5) / samples * 2.0 - 1.0
    uu, vv = np.meshgrid(ticks, ticks)
    keep = uu**2 + vv**2 <= 1.0
    pts = np.stack([uu[keep], vv[keep]], axis=1) @ (2.0 * chol).T + np.array(g.mean)
    if len(pts) == 0:
        return 0.0
    hits = sum(1 for p in pts if point_in_polygon(p[0], p[1], polygon))
    return hits / len(pts)


def author_suppression(
    base: GaussianMixtureSpec,
    region,
    mode: str,
    attenuation: float = 0.0,
    max_render_side: int = 256,
) -> GaussianMixtureSpec:
    """Suppress authored attention inside a polygonal region.

    ``relative``: components whose mean falls inside the region keep their
    shape but have weights multiplied by ``attenuation``.

    ``absolute`` (attenuation must be 0): components centered inside the
    region are removed; remaining components whose 2-sigma ellipse overlaps
    the region by 10% or more are shrunk until the rendered mass inside the
    region drops below 1% of the total.

    A region touching nothing returns the spec object unchanged.
    """
    if mode not in ("absolute", "relative"):
        raise InvalidArgumentsError(f"unknown suppression mode {mode!r}")
    polygon = [(float(x), float(y)) for x, y in region]
    if len(polygon) < 3 or _polygon_area(polygon) <= 0.0:
        raise InvalidArgumentsError("suppression region must be a non-degenerate polygon")
    if mode == "absolute" and attenuation != 0.0:
        raise InvalidArgumentsError("absolute suppression requires attenuation = 0")
    if not (0.0 <= attenuation <= 1.0):
        raise InvalidArgumentsError("attenuation must lie in [0, 1]")

    inside_flags = [point_in_polygon(g.mean[0], g.mean[1], polygon) for g in base.components]

    if mode == "relative":
        if not any(inside_flags):
            return base
        comps = tuple(
            Gaussian2D(weight=g.weight * attenuation, mean=g.mean, cov=g.cov)
            if flag
            else g
            for g, flag in zip(base.components, inside_flags)
        )
        return GaussianMixtureSpec(base.canvas_width, base.canvas_height, comps)

    survivors = [g for g, flag in zip(base.components, inside_flags) if not flag]
    initially_flagged = [_ellipse_overlap_fraction(g, polygon) >= 0.10 for g in survivors]
    if not any(inside_flags) and not any(initially_flagged):
        return base

    k = min(1.0, max_render_side / max(base.canvas_width, base.canvas_height))
    rw = max(1, int(round(base.canvas_width * k)))
    rh = max(1, int(round(base.canvas_height * k)))
    mask = polygon_mask(
        rw, rh,
        [(x * rw / base.canvas_width, y * rh / base.canvas_height) for x, y in polygon],
    )

    def component_region_masses(components):
        """(inside_mass, total_mass) per component at working resolution."""
        out = []
        for g in components:
            spec = GaussianMixtureSpec(base.canvas_width, base.canvas_height, (g,))
            work, *_ = _working_frame(spec, max_render_side)
            rendered = render_mixture(work, rw, rh).values
            out.append((float(rendered[mask].sum()), float(rendered.sum())))
        return out

    # Shrink until under 1% of rendered mass remains inside. Components whose
    # 2-sigma ellipse overlaps the region by >= 10% shrink first; if the
    # budget is still blown by long tails, the worst remaining offender is
    # shrunk too. Survivor means are all outside, so shrinking always drives
    # their in-region mass toward zero.
    current = list(survivors)
    for _ in range(60):
        if not current:
            break
        masses = component_region_masses(current)
        total = sum(t for _, t in masses)
        inside = sum(i for i, _ in masses)
        if total <= 0 or inside < 0.01 * total:
            break
        flags = [_ellipse_overlap_fraction(g, polygon) >= 0.10 for g in current]
        if not any(flags):
            worst = max(range(len(current)), key=lambda j: masses[j][0])
            flags[worst] = True
        current = [
            Gaussian2D(weight=g.weight, mean=g.mean, cov=0.7 * g.cov) if flag else g
            for g, flag in zip(current, flags)
        ]
    return GaussianMixtureSpec(base.canvas_width, base.canvas_height, tuple(current))
