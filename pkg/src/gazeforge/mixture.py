"""User-authored saliency as weighted bivariate Gaussians, and its renderer."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidArgumentsError, InvalidCovarianceError
from .maps import SaliencyMap

__all__ = [
    "Gaussian2D",
    "GaussianMixtureSpec",
    "render_mixture",
    "mixture_to_dict",
    "mixture_from_dict",
]

# Asymmetry beyond this (relative to the matrix scale) is rejected rather
# than silently symmetrized.
_SYMMETRY_RTOL = 1e-9

# Squared Mahalanobis distances are clamped here before exponentiation:
# exp(-200) ~ 1.4e-87 is far below every tolerance in the package, and the
# clamp keeps tail pixels out of the subnormal range, where this CPU's
# exp/multiply slow down by two orders of magnitude.
MAHALANOBIS_CLAMP = 400.0


@dataclass(frozen=True, eq=False)
class Gaussian2D:
    """One weighted bivariate Gaussian bump: weight, mean (x, y), 2x2 covariance."""

    weight: float
    mean: tuple
    cov: np.ndarray

    def __post_init__(self):
        w = float(self.weight)
        if not np.isfinite(w) or w < 0:
            raise InvalidArgumentsError("gaussian weight must be finite and >= 0")
        mean = (float(self.mean[0]), float(self.mean[1]))
        if not all(np.isfinite(mean)):
            raise InvalidArgumentsError("gaussian mean must be finite")
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.shape != (2, 2) or not np.all(np.isfinite(cov)):
            raise InvalidCovarianceError("covariance must be a finite 2x2 matrix")
        scale = max(abs(cov).max(), 1.0)
        if abs(cov[0, 1] - cov[1, 0]) > _SYMMETRY_RTOL * scale:
            raise InvalidCovarianceError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise InvalidCovarianceError(
                "covariance must be positive-definite (both eigenvalues > 0)"
            ) from None
        cov.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def inv_cov(self) -> np.ndarray:
        return np.linalg.inv(self.cov)


@dataclass(frozen=True, eq=False)
class GaussianMixtureSpec:
    """Ordered Gaussian components over a canvas; may be empty (renders to zero)."""

    canvas_width: int
    canvas_height: int
    components: tuple

    def __post_init__(self):
        w, h = int(self.canvas_width), int(self.canvas_height)
        if w < 1 or h < 1:
            raise InvalidArgumentsError("canvas dimensions must be >= 1")
        comps = tuple(self.components)
        for i, g in enumerate(comps):
            if not isinstance(g, Gaussian2D):
                raise InvalidArgumentsError(f"component {i} is not a Gaussian2D")
            mx, my = g.mean
            if not (-w <= mx <= 2 * w and -h <= my <= 2 * h):
                raise InvalidArgumentsError(
                    f"component {i} mean {g.mean} outside the bounded off-canvas "
                    f"domain [-{w}, {2 * w}] x [-{h}, {2 * h}]"
                )
        object.__setattr__(self, "canvas_width", w)
        object.__setattr__(self, "canvas_height", h)
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)


def render_mixture(spec: GaussianMixtureSpec, width: int, height: int) -> SaliencyMap:
    """Evaluate the weighted Gaussian sum at every pixel center.

    value(x, y) = sum_i w_i * exp(-0.5 * (p - mu_i)^T Sigma_i^-1 (p - mu_i))
    with p on the integer pixel-center lattice. Deterministic; an empty
    mixture renders to the all-zero map.
    """
    if width < 1 or height < 1:
        raise InvalidArgumentsError("render dimensions must be >= 1")
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys)
    total = np.zeros((height, width))
    for g in spec.components:
        inv = g.inv_cov
        dx = gx - g.mean[0]
        dy = gy - g.mean[1]
        mahal = inv[0, 0] * dx * dx + 2.0 * inv[0, 1] * dx * dy + inv[1, 1] * dy * dy
        np.minimum(mahal, MAHALANOBIS_CLAMP, out=mahal)
        total += g.weight * np.exp(-0.5 * mahal)
    return SaliencyMap(total)


def mixture_to_dict(spec: GaussianMixtureSpec) -> dict:
    """Serialize to the interchange JSON shape:
    ``{"canvas": {"w", "h"}, "gaussians": [{"w", "mu", "sigma"}]}``.
    """
    return {
        "canvas": {"w": spec.canvas_width, "h": spec.canvas_height},
        "gaussians": [
            {
                "w": g.weight,
                "mu": [g.mean[0], g.mean[1]],
                "sigma": [
                    [g.cov[0, 0], g.cov[0, 1]],
                    [g.cov[1, 0], g.cov[1, 1]],
                ],
            }
            for g in spec.components
        ],
    }


def mixture_from_dict(data: dict) -> GaussianMixtureSpec:
    """Parse the interchange JSON shape; raises FormatError naming the bad field."""
    try:
        canvas = data["canvas"]
        w, h = int(canvas["w"]), int(canvas["h"])
        raw = data.get("gaussians", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed mixture spec: {exc}") from None
    comps = []
    for i, item in enumerate(raw):
        try:
            comps.append(
                Gaussian2D(
                    weight=float(item["w"]),
                    mean=(float(item["mu"][0]), float(item["mu"][1])),
                    cov=np.array(item["sigma"], dtype=np.float64),
                )
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"malformed gaussian at gaussians[{i}]: {exc}") from None
        except InvalidCovarianceError as exc:
            raise FormatError(f"gaussians[{i}].sigma: {exc}") from None
        except InvalidArgumentsError as exc:
            raise FormatError(f"gaussians[{i}]: {exc}") from None
    try:
        return GaussianMixtureSpec(canvas_width=w, canvas_height=h, components=tuple(comps))
    except InvalidArgumentsError as exc:
        raise FormatError(str(exc)) from None
