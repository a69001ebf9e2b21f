"""Saliency similarity metrics: AUC (Judd variant), NSS, CC, KL and SIM.

Conventions follow the fixation-benchmark defaults: population (biased)
standard deviation for NSS and CC, distribution normalization inside KL and
SIM, and an epsilon regularizer only inside the KL log denominator. AUC and
NSS take a map plus raw fixations; CC, KL and SIM compare two maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMapError,
    EmptyFixationsError,
    GazeForgeError,
    ShapeMismatchError,
    UndefinedMetricError,
)
from .maps import FixationSet, SaliencyMap, nearest_pixels, resample_map

__all__ = [
    "MetricReport",
    "auc_judd",
    "nss",
    "cc",
    "kl_divergence",
    "sim",
    "evaluate_pair",
    "mean_reports",
    "KL_EPSILON",
]

KL_EPSILON = 1e-8


def _fixated_pixels(smap: SaliencyMap, fixations: FixationSet) -> np.ndarray:
    pixels = nearest_pixels(fixations.points(), smap.width, smap.height)
    if len(pixels) == 0:
        raise EmptyFixationsError("no in-bounds fixations")
    return pixels


def auc_judd(pred: SaliencyMap, fixations: FixationSet) -> float:
    """Area under the ROC curve, thresholding at each distinct fixated value.

    Fixated pixels (the unique nearest pixels of the in-bounds fixations) are
    the positives, every other pixel is a negative. The curve is integrated
    with the trapezoid rule between (0, 0) and (1, 1). Invariant under any
    strictly monotone transform of the prediction.
    """
    if pred.is_constant:
        raise UndefinedMetricError("auc", "prediction map is constant")
    pixels = _fixated_pixels(pred, fixations)
    fix_mask = np.zeros((pred.height, pred.width), dtype=bool)
    fix_mask[pixels[:, 1], pixels[:, 0]] = True
    fix_values = pred.values[fix_mask]
    neg_values = pred.values[~fix_mask]
    n_fix = fix_values.size
    n_neg = neg_values.size
    if n_neg == 0:
        raise UndefinedMetricError("auc", "every pixel is fixated")

    thresholds = np.unique(fix_values)[::-1]
    # ROC points from (0, 0) through descending thresholds to (1, 1).
    tpr = [0.0]
    fpr = [0.0]
    for t in thresholds:
        tpr.append(float(np.count_nonzero(fix_values >= t)) / n_fix)
        fpr.append(float(np.count_nonzero(neg_values >= t)) / n_neg)
    tpr.append(1.0)
    fpr.append(1.0)
    area = 0.0
    for i in range(len(tpr) - 1):
        area += (fpr[i + 1] - fpr[i]) * (tpr[i + 1] + tpr[i]) / 2.0
    return area


def nss(pred: SaliencyMap, fixations: FixationSet) -> float:
    """Mean of the standardized prediction at the fixated pixels.

    Standardization uses the population std; each fixation contributes once
    (duplicates at the same pixel count multiply).
    """
    std = float(pred.values.std())
    if std == 0.0:
        raise UndefinedMetricError("nss", "prediction map has zero variance")
    pixels = _fixated_pixels(pred, fixations)
    z = (pred.values - pred.values.mean()) / std
    return float(z[pixels[:, 1], pixels[:, 0]].mean())


def cc(a: SaliencyMap, b: SaliencyMap) -> float:
    """Pearson correlation over all pixels; inputs must already share dims."""
    if not a.same_shape(b):
        raise ShapeMismatchError(
            f"cc needs equal dims, got {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    av = a.values - a.values.mean()
    bv = b.values - b.values.mean()
    denom = np.sqrt((av * av).sum() * (bv * bv).sum())
    if denom == 0.0:
        raise UndefinedMetricError("cc", "one of the maps has zero variance")
    return float((av * bv).sum() / denom)


def kl_divergence(
    target: SaliencyMap, achieved: SaliencyMap, epsilon: float = KL_EPSILON
) -> float:
    """KL(target || achieved) between the distribution-normalized maps.

    Regularized as ``sum P * ln(P / (Q + eps))`` over the pixels where P > 0,
    then clamped to >= 0 (the epsilon floor can push the raw sum marginally
    negative). Penalizes achieved maps that miss target mass.
    """
    if not target.same_shape(achieved):
        raise ShapeMismatchError(
            f"kl needs equal dims, got {target.width}x{target.height} "
            f"vs {achieved.width}x{achieved.height}"
        )
    t_sum = target.total_mass
    if t_sum <= 0:
        raise DegenerateMapError("kl target has no positive mass")
    a_sum = achieved.total_mass
    if a_sum <= 0:
        raise DegenerateMapError("kl achieved map has no positive mass")
    p = target.values / t_sum
    q = achieved.values / a_sum
    mask = p > 0
    value = float(np.sum(p[mask] * np.log(p[mask] / (q[mask] + epsilon))))
    return max(value, 0.0)


def sim(a: SaliencyMap, b: SaliencyMap) -> float:
    """Histogram intersection of the distribution-normalized maps, in [0, 1]."""
    if not a.same_shape(b):
        raise ShapeMismatchError(
            f"sim needs equal dims, got {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    a_sum = a.total_mass
    b_sum = b.total_mass
    if a_sum <= 0 or b_sum <= 0:
        raise DegenerateMapError("sim requires positive mass in both maps")
    return float(np.minimum(a.values / a_sum, b.values / b_sum).sum())


@dataclass
class MetricReport:
    """Per-pair metric values; a field is None when its metric errored or
    was not applicable (auc/nss are present iff fixations were supplied).
    ``errors`` maps field name to the failure reason, never silent NaN."""

    auc: float | None = None
    nss: float | None = None
    cc: float | None = None
    kl: float | None = None
    sim: float | None = None
    resampled: bool = False
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "auc": self.auc,
            "nss": self.nss,
            "cc": self.cc,
            "kl": self.kl,
            "sim": self.sim,
            "resampled": self.resampled,
        }
        if self.errors:
            out["errors"] = dict(self.errors)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        return cls(
            auc=data.get("auc"),
            nss=data.get("nss"),
            cc=data.get("cc"),
            kl=data.get("kl"),
            sim=data.get("sim"),
            resampled=bool(data.get("resampled", False)),
            errors=dict(data.get("errors", {})),
        )


def evaluate_pair(
    target: SaliencyMap,
    achieved: SaliencyMap,
    fixations: FixationSet | None = None,
    epsilon: float = KL_EPSILON,
) -> MetricReport:
    """Full metric report for one target/achieved pair.

    The achieved map is resampled to the target's dimensions first (the
    target is the specification of record). CC, KL and SIM are always
    attempted; AUC and NSS only when fixations are given, scoring the target
    map against them. Individual metric failures land in ``errors``.
    """
    report = MetricReport()
    if not target.same_shape(achieved):
        achieved = resample_map(achieved, target.width, target.height)
        report.resampled = True

    def attempt(name, fn):
        try:
            setattr(report, name, fn())
        except GazeForgeError as exc:
            report.errors[name] = str(exc)

    attempt("cc", lambda: cc(target, achieved))
    attempt("kl", lambda: kl_divergence(target, achieved, epsilon))
    attempt("sim", lambda: sim(target, achieved))
    if fixations is not None:
        attempt("auc", lambda: auc_judd(target, fixations))
        attempt("nss", lambda: nss(target, fixations))
    return report


def pooled_metrics(items: list) -> MetricReport:
    """Pooled alternative to per-pair averaging for a batch.

    ``items`` holds ``(target, achieved, fixations_or_None)`` triples; the
    achieved map is resampled to its target's dims. CC, KL and SIM are
    computed once over the concatenated pixel vectors (mass normalized over
    the whole pool); NSS pools the per-map standardized fixation samples.
    AUC is omitted: a single ROC over differently scaled maps has no
    benchmark-sanctioned definition.
    """
    t_parts, a_parts, z_samples = [], [], []
    for target, achieved, fixations in items:
        if not target.same_shape(achieved):
            achieved = resample_map(achieved, target.width, target.height)
        t_parts.append(target.values.ravel())
        a_parts.append(achieved.values.ravel())
        if fixations is not None:
            std = float(target.values.std())
            if std > 0:
                pixels = nearest_pixels(
                    fixations.points(), target.width, target.height
                )
                if len(pixels):
                    z = (target.values - target.values.mean()) / std
                    z_samples.append(z[pixels[:, 1], pixels[:, 0]])
    pooled_t = SaliencyMap(np.concatenate(t_parts)[None, :])
    pooled_a = SaliencyMap(np.concatenate(a_parts)[None, :])
    report = MetricReport()
    report.cc = cc(pooled_t, pooled_a)
    report.kl = kl_divergence(pooled_t, pooled_a)
    report.sim = sim(pooled_t, pooled_a)
    if z_samples:
        report.nss = float(np.concatenate(z_samples).mean())
    return report


def mean_reports(reports: list) -> tuple[MetricReport, MetricReport]:
    """Fieldwise mean and population std over reports (None fields skipped).

    Returns ``(mean, std)`` as MetricReports; a field is None in both when no
    report carried it.
    """
    mean = MetricReport()
    std = MetricReport()
    for name in ("auc", "nss", "cc", "kl", "sim"):
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        if values:
            arr = np.array(values, dtype=np.float64)
            setattr(mean, name, float(arr.mean()))
            setattr(std, name, float(arr.std()))
    return mean, std
