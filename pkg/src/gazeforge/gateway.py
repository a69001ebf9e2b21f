"""Client for saliency-conditioned generation backends, plus the
deterministic mocks that close the loop without any model weights.

Wire protocol (JSON over POST, canonical key order):

    request:  {"prompt": str,
               "conditioning": {"w": int, "h": int, "data_b64": <SMAP bytes>},
               "seed": u64, "steps": int}
    response: {"image_b64": <PNG bytes>, "backend_id": str}

The mock backend answers with a grayscale PNG whose luminance equals the
conditioning map scaled to [0, 255] at the requested dimensions; identical
requests yield identical bytes. The stub predictor inverts that: luminance
(Rec. 709), a 2 px Gaussian blur, max-normalize. Together they emulate the
generate-then-measure evaluation loop end to end.
"""
from __future__ import annotations

import base64
import os
import time
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import (
    BackendError,
    InvalidArgumentsError,
    MalformedResponseError,
)
from .formats import (
    decode_png,
    encode_gray_png,
    smap_from_bytes,
    smap_to_bytes,
)
from .maps import SaliencyMap, gaussian_blur_normalized, resample_map
from .transport import post_json
from .video import SaliencySequence

__all__ = [
    "GenerationRequest",
    "GenerationResponse",
    "BackendConfig",
    "MockBackend",
    "GenerationClient",
    "SaliencyPredictorClient",
    "StubSaliencyPredictor",
    "stub_predict",
    "DEFAULT_GENERATION_SIDE",
]

AUTH_TOKEN_ENV = "GAZEFORGE_BACKEND_TOKEN"
DEFAULT_GENERATION_SIDE = 512  # typical diffusion-backend conditioning resolution


@dataclass(frozen=True)
class GenerationRequest:
    """One generation call: prompt + conditioning map in [0, 1] + geometry.

    Width and height must be multiples of 8 (latent-grid compatibility of
    the usual backends); violations are rejected before any network traffic.
    """

    prompt: str
    conditioning: SaliencyMap
    width: int = DEFAULT_GENERATION_SIDE
    height: int = DEFAULT_GENERATION_SIDE
    seed: int = 0
    steps: int = 20

    def __post_init__(self):
        if float(self.conditioning.values.max()) > 1.0:
            raise InvalidArgumentsError(
                "conditioning values must lie in [0, 1]; max-normalize first"
            )
        if self.width < 8 or self.height < 8 or self.width % 8 or self.height % 8:
            raise InvalidArgumentsError("width and height must be positive multiples of 8")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidArgumentsError("seed must fit in u64")
        if int(self.steps) <= 0:
            raise InvalidArgumentsError("steps must be > 0")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "steps", int(self.steps))

    def to_protocol(self) -> dict:
        return {
            "prompt": self.prompt,
            "conditioning": {
                "w": self.conditioning.width,
                "h": self.conditioning.height,
                "data_b64": base64.b64encode(smap_to_bytes(self.conditioning)).decode("ascii"),
            },
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "steps": self.steps,
        }


@dataclass(frozen=True)
class GenerationResponse:
    image_bytes: bytes
    backend_id: str
    elapsed_ms: float


@dataclass
class BackendConfig:
    """Where generations go. ``mock:`` selects the in-process mock; anything
    http(s):// goes over the wire with the shared retry policy. The auth
    token is read from the environment at call time, never stored."""

    endpoint: str = "mock:"
    timeout_ms: int = 60_000
    auth_env: str = AUTH_TOKEN_ENV

    @property
    def is_mock(self) -> bool:
        return self.endpoint.startswith("mock:")

    def auth_headers(self) -> dict:
        token = os.environ.get(self.auth_env, "")
        return {"Authorization": f"Bearer {token}"} if token else {}


class MockBackend:
    """Reference backend: the generated image IS the conditioning map.

    Shared by the in-process transport and the standalone server so both
    speak byte-identical protocol.
    """

    backend_id = "mock-v1"

    def handle(self, request: dict) -> dict:
        try:
            cond = request["conditioning"]
            payload = base64.b64decode(cond["data_b64"])
            width = int(request["width"])
            height = int(request["height"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed generation request: {exc}") from None
        smap = smap_from_bytes(payload)
        if int(cond["w"]) != smap.width or int(cond["h"]) != smap.height:
            raise BackendError("conditioning dims disagree with SMAP payload")
        sized = resample_map(smap, width, height)
        gray = np.floor(np.clip(sized.values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
        return {
            "image_b64": base64.b64encode(encode_gray_png(gray)).decode("ascii"),
            "backend_id": self.backend_id,
        }


class GenerationClient:
    """Thread-safe generation client; per-request state stays local.

    ``transport(payload) -> dict`` can be injected for tests (fault
    injection); otherwise the endpoint decides between the in-process mock
    and HTTP.
    """

    def __init__(self, config: BackendConfig | None = None, transport=None, sleep=None):
        self.config = config or BackendConfig()
        if transport is not None:
            self._transport = transport
        elif self.config.is_mock:
            backend = MockBackend()
            self._transport = backend.handle
        else:
            self._transport = None
        self._sleep = sleep

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        payload = request.to_protocol()
        started = time.monotonic()
        kwargs = {}
        if self._sleep is not None:
            kwargs["sleep"] = self._sleep
        data = post_json(
            self.config.endpoint,
            payload,
            timeout_ms=self.config.timeout_ms,
            headers=self.config.auth_headers(),
            transport=self._transport,
            **kwargs,
        )
        elapsed_ms = (time.monotonic() - started) * 1000.0
        if "error" in data:
            raise BackendError(f"backend error: {data['error']}")
        try:
            image = base64.b64decode(data["image_b64"])
            backend_id = str(data["backend_id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"generation response malformed: {exc}") from None
        pixels = decode_png(image)
        if pixels.shape[0] != request.height or pixels.shape[1] != request.width:
            raise MalformedResponseError(
                f"backend returned {pixels.shape[1]}x{pixels.shape[0]}, "
                f"requested {request.width}x{request.height}"
            )
        return GenerationResponse(
            image_bytes=image, backend_id=backend_id, elapsed_ms=elapsed_ms
        )

    def generate_sequence(
        self,
        prompt: str,
        conditioning: SaliencySequence,
        width: int | None = None,
        height: int | None = None,
        seed: int = 0,
        steps: int = 20,
        max_workers: int = 1,
    ) -> list:
        """One generation per frame, seed salted by the frame index, output
        order preserved. Per-frame failures are collected and re-raised after
        3 consecutive ones."""
        width = width if width is not None else _round8(conditioning.width)
        height = height if height is not None else _round8(conditioning.height)
        requests = [
            GenerationRequest(
                prompt=prompt,
                conditioning=frame,
                width=width,
                height=height,
                seed=(seed + i) % 2**64,
                steps=steps,
            )
            for i, frame in enumerate(conditioning.frames)
        ]
        responses: list = [None] * len(requests)
        failures = []
        consecutive = 0
        if max_workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=min(max_workers, 4)) as pool:
                futures = [pool.submit(self.generate, r) for r in requests]
                for i, fut in enumerate(futures):
                    try:
                        responses[i] = fut.result()
                        consecutive = 0
                    except BackendError as exc:
                        failures.append((i, exc))
                        consecutive += 1
        else:
            for i, req in enumerate(requests):
                try:
                    responses[i] = self.generate(req)
                    consecutive = 0
                except BackendError as exc:
                    failures.append((i, exc))
                    consecutive += 1
                    if consecutive >= 3:
                        raise BackendError(
                            f"aborting after 3 consecutive frame failures "
                            f"(first: frame {failures[-3][0]}: {failures[-3][1]})"
                        ) from None
        if failures:
            raise BackendError(
                f"{len(failures)} frame(s) failed: "
                + "; ".join(f"frame {i}: {e}" for i, e in failures[:5])
            )
        return responses


def _round8(n: int) -> int:
    return max(8, int(round(n / 8)) * 8)


@runtime_checkable
class SaliencyPredictorClient(Protocol):
    """Pluggable saliency predictor: image bytes to map, frame list to
    sequence. Real learned predictors slot in behind this; deterministic
    per input is part of the contract."""

    def predict_image(self, image_bytes: bytes) -> SaliencyMap:  # pragma: no cover
        ...

    def predict_video(self, frames, fps: float) -> SaliencySequence:  # pragma: no cover
        ...


class StubSaliencyPredictor:
    """Deterministic stand-in for a learned saliency predictor.

    predict_image: Rec. 709 luminance, 2 px Gaussian blur (border-
    renormalized, so uniform images stay uniform), max-normalize. An
    all-black input comes back as an all-zero map (zero total_mass flags
    it); a uniform input comes back constant (is_constant flags it).
    """

    blur_sigma_px = 2.0

    def predict_image(self, image_bytes: bytes) -> SaliencyMap:
        pixels = decode_png(image_bytes)
        channels = pixels.shape[2]
        if channels in (1, 2):
            lum = pixels[:, :, 0].astype(np.float64) / 255.0
        else:
            rgb = pixels[:, :, :3].astype(np.float64) / 255.0
            lum = 0.2126 * rgb[:, :, 0] + 0.7152 * rgb[:, :, 1] + 0.0722 * rgb[:, :, 2]
        blurred = gaussian_blur_normalized(lum, self.blur_sigma_px)
        peak = float(blurred.max())
        if peak <= 0.0:
            return SaliencyMap(np.zeros_like(blurred))
        return SaliencyMap(blurred / peak)

    def predict_video(self, frames, fps: float) -> SaliencySequence:
        maps = [self.predict_image(f) for f in frames]
        return SaliencySequence(frames=tuple(maps), fps=fps)


def stub_predict(image_bytes: bytes) -> SaliencyMap:
    return StubSaliencyPredictor().predict_image(image_bytes)
