"""Per-frame saliency sequences: temporal smoothing, frame-wise evaluation,
and the SSEQ container.

SSEQ container: ``b"SSEQ"``, u32 version=1, u32 frameCount, f32 fps, then
frameCount consecutive SMAP payloads; little-endian throughout; round-trips
bit-exactly.
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptySequenceError, FormatError, InvalidArgumentsError
from .maps import SaliencyMap
from .metrics import MetricReport, evaluate_pair, mean_reports

__all__ = [
    "SaliencySequence",
    "smooth_temporal",
    "evaluate_sequence",
    "SequenceEvaluation",
    "sseq_to_bytes",
    "sseq_from_bytes",
    "write_sseq",
    "read_sseq",
]

SSEQ_MAGIC = b"SSEQ"
SSEQ_VERSION = 1


@dataclass(frozen=True, eq=False)
class SaliencySequence:
    """Ordered saliency frames with a fixed frame rate; all frames share dims."""

    frames: tuple
    fps: float

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise EmptySequenceError("sequence needs at least one frame")
        if not (np.isfinite(self.fps) and self.fps > 0):
            raise InvalidArgumentsError("fps must be finite and positive")
        first = frames[0]
        for i, f in enumerate(frames):
            if not isinstance(f, SaliencyMap):
                raise InvalidArgumentsError(f"frame {i} is not a SaliencyMap")
            if not f.same_shape(first):
                raise InvalidArgumentsError(
                    f"frame {i} dims {f.width}x{f.height} != {first.width}x{first.height}"
                )
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fps", float(self.fps))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height


def smooth_temporal(seq: SaliencySequence, alpha: float) -> SaliencySequence:
    """Exponential moving average over frames: out_t = a*in_t + (1-a)*out_{t-1},
    seeded with the first frame. alpha = 1 is the identity; EMA is convex, so
    non-negativity and per-frame distribution mass are preserved."""
    if not (0.0 < alpha <= 1.0):
        raise InvalidArgumentsError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        return seq
    out = [seq.frames[0]]
    state = seq.frames[0].values
    for frame in seq.frames[1:]:
        state = alpha * frame.values + (1.0 - alpha) * state
        out.append(SaliencyMap(state))
    return SaliencySequence(frames=tuple(out), fps=seq.fps)


@dataclass
class SequenceEvaluation:
    per_frame: list
    mean: MetricReport
    std: MetricReport
    frames_evaluated: int
    trimmed: int = 0

    def to_dict(self) -> dict:
        return {
            "perFrame": [r.to_dict() for r in self.per_frame],
            "mean": self.mean.to_dict(),
            "std": self.std.to_dict(),
            "framesEvaluated": self.frames_evaluated,
            "trimmed": self.trimmed,
        }


def evaluate_sequence(
    target: SaliencySequence, achieved: SaliencySequence
) -> SequenceEvaluation:
    """Frame-wise cc/kl/sim plus mean and population-std aggregate.

    Length mismatches are trimmed to the shorter sequence with a warning;
    no frames are ever interpolated into existence.
    """
    n = min(len(target), len(achieved))
    trimmed = max(len(target), len(achieved)) - n
    if trimmed:
        warnings.warn(
            f"sequence length mismatch ({len(target)} vs {len(achieved)}); "
            f"evaluating first {n} frames",
            stacklevel=2,
        )
    if n == 0:
        raise EmptySequenceError("no overlapping frames to evaluate")
    reports = [
        evaluate_pair(target.frames[i], achieved.frames[i]) for i in range(n)
    ]
    mean, std = mean_reports(reports)
    return SequenceEvaluation(
        per_frame=reports, mean=mean, std=std, frames_evaluated=n, trimmed=trimmed
    )


def sseq_to_bytes(seq: SaliencySequence) -> bytes:
    from .formats import smap_to_bytes

    header = SSEQ_MAGIC + struct.pack("<IIf", SSEQ_VERSION, len(seq), seq.fps)
    return header + b"".join(smap_to_bytes(f) for f in seq.frames)


def sseq_from_bytes(payload: bytes) -> SaliencySequence:
    from .formats import smap_from_bytes

    if len(payload) < 16:
        raise FormatError("SSEQ payload truncated before header")
    if payload[:4] != SSEQ_MAGIC:
        raise FormatError("bad SSEQ magic")
    version, count, fps = struct.unpack("<IIf", payload[4:16])
    if version != SSEQ_VERSION:
        raise FormatError(f"unsupported SSEQ version {version}")
    if count < 1:
        raise FormatError("SSEQ must contain at least one frame")
    frames = []
    pos = 16
    for i in range(count):
        if pos + 16 > len(payload):
            raise FormatError(f"SSEQ truncated at frame {i}")
        _, w, h = struct.unpack("<III", payload[pos + 4 : pos + 16])
        size = 16 + 4 * w * h
        chunk = payload[pos : pos + size]
        if len(chunk) != size:
            raise FormatError(f"SSEQ truncated inside frame {i}")
        try:
            frames.append(smap_from_bytes(chunk))
        except FormatError as exc:
            raise FormatError(f"SSEQ frame {i}: {exc}") from None
        pos += size
    if pos != len(payload):
        raise FormatError(f"SSEQ has {len(payload) - pos} trailing bytes")
    return SaliencySequence(frames=tuple(frames), fps=fps)


def write_sseq(seq: SaliencySequence, path) -> None:
    Path(path).write_bytes(sseq_to_bytes(seq))


def read_sseq(path) -> SaliencySequence:
    return sseq_from_bytes(Path(path).read_bytes())
