"""Saliency rasters, fixation sets, and the resampling/normalization toolbox.

Coordinate convention used everywhere in this package: ``values[y, x]`` is the
field sampled at the center of pixel ``(x, y)``, and pixel centers sit on the
integer lattice (x right, y down, top-left origin). Gaussian means, fixations
and gaze origins are all expressed in these pixel-center coordinates, which
keeps analytic rendering, rasters and bilinear resampling mutually aligned
with no half-pixel bias.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMapError,
    EmptyFixationsError,
    InvalidArgumentsError,
)

__all__ = [
    "SaliencyMap",
    "FixationSet",
    "normalize_to_distribution",
    "max_normalize",
    "resample_map",
    "empirical_saliency",
    "gaussian_blur",
]


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """Non-negative, finite scalar field over a pixel grid.

    Immutable after construction: the backing array is copied and marked
    read-only, so maps can be shared freely between threads.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidArgumentsError("saliency map must be a non-empty 2-D grid")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentsError("saliency map values must be finite")
        if float(arr.min()) < 0.0:
            raise InvalidArgumentsError("saliency map values must be non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.values.sum())

    @property
    def is_constant(self) -> bool:
        lo, hi = float(self.values.min()), float(self.values.max())
        return hi - lo <= 1e-12 * max(abs(hi), 1.0)

    def argmax(self) -> tuple[int, int]:
        """Location of the largest value as ``(x, y)``; first in row-major order on ties."""
        idx = int(np.argmax(self.values))
        y, x = divmod(idx, self.width)
        return x, y

    def same_shape(self, other: "SaliencyMap") -> bool:
        return self.values.shape == other.values.shape


@dataclass(frozen=True, eq=False)
class FixationSet:
    """Timestamped gaze samples from one or more observers.

    records: tuple of ``(subject_id, timestamp_ms, x_px, y_px)``; timestamps
    must be non-decreasing within each subject. display_ppd converts degrees
    of visual angle to pixels for this recording geometry.
    """

    records: tuple
    display_ppd: float

    def __post_init__(self):
        recs = tuple(
            (str(s), float(t), float(x), float(y)) for (s, t, x, y) in self.records
        )
        if not math.isfinite(self.display_ppd) or self.display_ppd <= 0:
            raise InvalidArgumentsError("display_ppd must be a positive finite number")
        last_t: dict[str, float] = {}
        for subject, t, x, y in recs:
            if not (math.isfinite(t) and math.isfinite(x) and math.isfinite(y)):
                raise InvalidArgumentsError("fixation coordinates and timestamps must be finite")
            if subject in last_t and t < last_t[subject]:
                raise InvalidArgumentsError(
                    f"timestamps must be non-decreasing per subject (subject {subject!r})"
                )
            last_t[subject] = t
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "display_ppd", float(self.display_ppd))

    def __len__(self) -> int:
        return len(self.records)

    def points(self) -> np.ndarray:
        """(N, 2) array of fixation positions as (x, y), record order preserved."""
        if not self.records:
            return np.zeros((0, 2))
        return np.array([(x, y) for (_, _, x, y) in self.records], dtype=np.float64)


def nearest_pixels(points: np.ndarray, width: int, height: int):
    """Map continuous (x, y) points to their nearest pixel, dropping out-of-grid ones.

    Rounds half-up (x + 0.5 floored) so the mapping is deterministic and
    order-independent. Returns integer (N, 2) array of (x, y) pixels.
    """
    if len(points) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    px = np.floor(points[:, 0] + 0.5).astype(np.int64)
    py = np.floor(points[:, 1] + 0.5).astype(np.int64)
    ok = (px >= 0) & (px < width) & (py >= 0) & (py < height)
    return np.stack([px[ok], py[ok]], axis=1)


def normalize_to_distribution(smap: SaliencyMap) -> SaliencyMap:
    """Scale a map so its values sum to 1 (a discrete probability distribution)."""
    total = smap.total_mass
    if total <= 0.0:
        raise DegenerateMapError("cannot distribution-normalize an all-zero map")
    return SaliencyMap(smap.values / total)


def max_normalize(smap: SaliencyMap) -> SaliencyMap:
    """Scale a map so its maximum value is 1."""
    peak = float(smap.values.max())
    if peak <= 0.0:
        raise DegenerateMapError("cannot max-normalize an all-zero map")
    return SaliencyMap(smap.values / peak)


def resample_map(smap: SaliencyMap, new_width: int, new_height: int) -> SaliencyMap:
    """Bilinear resampling with center-aligned sample positions.

    Destination pixel j samples the source at ``(j + 0.5) * src/dst - 0.5``,
    clamped to the border; identical dimensions return an exact copy.
    Non-negativity is preserved because all interpolation weights are >= 0.
    """
    if new_width < 1 or new_height < 1:
        raise InvalidArgumentsError("target dimensions must be >= 1")
    if new_width == smap.width and new_height == smap.height:
        return SaliencyMap(smap.values)
    return SaliencyMap(_bilinear(smap.values, new_width, new_height))


def _bilinear(values: np.ndarray, new_width: int, new_height: int) -> np.ndarray:
    src_h, src_w = values.shape
    sx = (np.arange(new_width) + 0.5) * (src_w / new_width) - 0.5
    sy = (np.arange(new_height) + 0.5) * (src_h / new_height) - 0.5
    sx = np.clip(sx, 0.0, src_w - 1.0)
    sy = np.clip(sy, 0.0, src_h - 1.0)
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    fx = sx - x0
    fy = sy - y0
    top = values[np.ix_(y0, x0)] * (1 - fx) + values[np.ix_(y0, x1)] * fx
    bot = values[np.ix_(y1, x0)] * (1 - fx) + values[np.ix_(y1, x1)] * fx
    return top * (1 - fy)[:, None] + bot * fy[:, None]


def gaussian_kernel_1d(sigma_px: float) -> np.ndarray:
    """Sampled Gaussian kernel truncated at 4 sigma and renormalized to sum 1."""
    if sigma_px <= 0:
        raise InvalidArgumentsError("sigma must be positive")
    radius = max(1, int(math.ceil(4.0 * sigma_px)))
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (d / sigma_px) ** 2)
    return k / k.sum()


def gaussian_blur(values: np.ndarray, sigma_px: float) -> np.ndarray:
    """Separable Gaussian blur with zero padding outside the grid.

    Equivalent to a dense 2-D convolution with the outer product of the
    truncated 1-D kernels, which is the form the brute-force oracles use.
    """
    kernel = gaussian_kernel_1d(sigma_px)
    radius = (len(kernel) - 1) // 2
    h, w = values.shape
    padded = np.zeros((h + 2 * radius, w))
    padded[radius : radius + h, :] = values
    rows = np.zeros_like(values)
    for i, kv in enumerate(kernel):
        rows += kv * padded[i : i + h, :]
    padded = np.zeros((h, w + 2 * radius))
    padded[:, radius : radius + w] = rows
    out = np.zeros_like(values)
    for i, kv in enumerate(kernel):
        out += kv * padded[:, i : i + w]
    return out


def gaussian_blur_normalized(values: np.ndarray, sigma_px: float) -> np.ndarray:
    """Gaussian blur with border renormalization (divides by the blurred
    all-ones field), so constant inputs stay exactly constant."""
    ones = np.ones_like(values)
    return gaussian_blur(values, sigma_px) / gaussian_blur(ones, sigma_px)


def empirical_saliency(
    fixations: FixationSet,
    width: int,
    height: int,
    sigma_deg: float = 1.0,
) -> SaliencyMap:
    """Convert gaze samples to an empirical saliency distribution.

    Each in-bounds fixation lands as a unit impulse on its nearest pixel; the
    impulse grid is blurred with an isotropic Gaussian of
    ``sigma_deg * display_ppd`` pixels (truncated at 4 sigma) and the result
    is distribution-normalized. Accumulation ignores subject identity and
    record order.
    """
    if width < 1 or height < 1:
        raise InvalidArgumentsError("grid dimensions must be >= 1")
    if sigma_deg <= 0:
        raise InvalidArgumentsError("sigma_deg must be positive")
    pixels = nearest_pixels(fixations.points(), width, height)
    if len(pixels) == 0:
        raise EmptyFixationsError("no in-bounds fixations")
    grid = np.zeros((height, width))
    np.add.at(grid, (pixels[:, 1], pixels[:, 0]), 1.0)
    sigma_px = sigma_deg * fixations.display_ppd
    blurred = gaussian_blur(grid, sigma_px)
    return normalize_to_distribution(SaliencyMap(blurred))
