"""Rigid-plus-uniform-scale image-space transforms applied to Gaussian mixtures."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentsError
from .mixture import Gaussian2D, GaussianMixtureSpec

__all__ = ["Transform2D", "transform_mixture"]


def _wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    elif t > math.pi:
        t -= 2.0 * math.pi
    return t


@dataclass(frozen=True, eq=False)
class Transform2D:
    """Translation + rotation + uniform scale about a pivot.

    Points map as ``p' = s * R(theta) * (p - pivot) + pivot + t``. The angle
    is normalized to (-pi, pi] at construction.
    """

    tx: float = 0.0
    ty: float = 0.0
    theta: float = 0.0
    scale: float = 1.0
    pivot: tuple = (0.0, 0.0)

    def __post_init__(self):
        s = float(self.scale)
        if not math.isfinite(s) or s <= 0:
            raise InvalidArgumentsError("scale must be positive and finite")
        for v in (self.tx, self.ty, self.theta, self.pivot[0], self.pivot[1]):
            if not math.isfinite(float(v)):
                raise InvalidArgumentsError("transform parameters must be finite")
        object.__setattr__(self, "tx", float(self.tx))
        object.__setattr__(self, "ty", float(self.ty))
        object.__setattr__(self, "theta", _wrap_angle(float(self.theta)))
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "pivot", (float(self.pivot[0]), float(self.pivot[1])))

    @classmethod
    def identity(cls, pivot=(0.0, 0.0)) -> "Transform2D":
        return cls(pivot=pivot)

    @property
    def rotation_matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]])

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        """Transform an (N, 2) array of (x, y) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        pivot = np.array(self.pivot)
        out = (pts - pivot) @ (self.scale * self.rotation_matrix).T
        return out + pivot + np.array([self.tx, self.ty])

    def apply_point(self, x: float, y: float) -> tuple:
        p = self.apply_points(np.array([[x, y]]))[0]
        return float(p[0]), float(p[1])

    def inverse(self) -> "Transform2D":
        """The transform undoing this one (same pivot)."""
        inv_scale = 1.0 / self.scale
        c, s = math.cos(-self.theta), math.sin(-self.theta)
        px, py = self.pivot
        # Solve p = s R (p' - pivot) + pivot + t for p'.
        dx, dy = -self.tx, -self.ty
        return Transform2D(
            tx=inv_scale * (c * dx - s * dy),
            ty=inv_scale * (s * dx + c * dy),
            theta=-self.theta,
            scale=inv_scale,
            pivot=(px, py),
        )

    def is_near_identity(self, t_tol=0.5, theta_tol=0.01, scale_tol=0.01) -> bool:
        return (
            math.hypot(self.tx, self.ty) < t_tol
            and abs(self.theta) < theta_tol
            and abs(self.scale - 1.0) < scale_tol
        )

    def to_dict(self) -> dict:
        return {
            "tx": self.tx,
            "ty": self.ty,
            "theta": self.theta,
            "scale": self.scale,
            "pivot": [self.pivot[0], self.pivot[1]],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Transform2D":
        return cls(
            tx=float(data.get("tx", 0.0)),
            ty=float(data.get("ty", 0.0)),
            theta=float(data.get("theta", 0.0)),
            scale=float(data.get("scale", 1.0)),
            pivot=tuple(data.get("pivot", (0.0, 0.0))),
        )


def transform_mixture(spec: GaussianMixtureSpec, transform: Transform2D) -> GaussianMixtureSpec:
    """Push a mixture through an image-space transform.

    Means move as points, covariances become ``s^2 R Sigma R^T``, weights are
    untouched. Canvas dimensions are preserved.
    """
    rot = transform.rotation_matrix
    s2 = transform.scale * transform.scale
    comps = []
    for g in spec.components:
        comps.append(
            Gaussian2D(
                weight=g.weight,
                mean=transform.apply_point(*g.mean),
                cov=s2 * (rot @ g.cov @ rot.T),
            )
        )
    return GaussianMixtureSpec(
        canvas_width=spec.canvas_width,
        canvas_height=spec.canvas_height,
        components=tuple(comps),
    )
