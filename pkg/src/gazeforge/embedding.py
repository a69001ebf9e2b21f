"""Prompt embedders used for reference retrieval.

The default is a deterministic hashed token feature embedder: no model
weights, no network, reproducible across machines, which keeps retrieval
testable offline. A remote client speaking the documented embedding protocol
is a drop-in replacement for real CLIP-style encoders.
"""
from __future__ import annotations

import hashlib
import re
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import MalformedResponseError
from .transport import post_json

__all__ = ["TextEmbedder", "HashedBigramEmbedder", "RemoteEmbedder", "default_embedder"]

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@runtime_checkable
class TextEmbedder(Protocol):
    """Deterministic prompt -> unit-norm vector mapping."""

    dimension: int
    embedder_id: str

    def embed(self, prompt: str) -> np.ndarray:  # pragma: no cover - protocol
        ...


class HashedBigramEmbedder:
    """Signed feature hashing of token unigrams and sentinel-padded bigrams.

    Each feature hashes (blake2b, fixed key) to a bucket and a sign; the
    accumulated vector is L2-normalized. Deterministic per prompt, stable
    across processes and platforms.
    """

    def __init__(self, dimension: int = 512, version: str = "v1"):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.embedder_id = f"hashed-bigram-{dimension}-{version}"

    def _features(self, prompt: str):
        tokens = _TOKEN_RE.findall(prompt.lower())
        padded = ["<s>", *tokens, "</s>"]
        yield from tokens
        for a, b in zip(padded, padded[1:]):
            yield f"{a}|{b}"

    def embed(self, prompt: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        for feature in self._features(prompt):
            digest = hashlib.blake2b(
                feature.encode("utf-8"), digest_size=8, key=b"gazeforge"
            ).digest()
            h = int.from_bytes(digest, "little")
            sign = 1.0 if h & 1 else -1.0
            vec[(h >> 1) % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # Pathological full cancellation; pin a deterministic direction.
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class RemoteEmbedder:
    """Client for a remote embedding endpoint: POST {"text": str} ->
    {"embedding": [float]}. Same retry policy as the generation gateway;
    responses are validated and re-normalized to unit norm."""

    def __init__(self, endpoint: str, dimension: int, embedder_id: str,
                 timeout_ms: int = 30_000, transport=None, sleep=None):
        self.endpoint = endpoint
        self.dimension = dimension
        self.embedder_id = embedder_id
        self.timeout_ms = timeout_ms
        self._transport = transport
        self._sleep = sleep

    def embed(self, prompt: str) -> np.ndarray:
        kwargs = {}
        if self._sleep is not None:
            kwargs["sleep"] = self._sleep
        data = post_json(
            self.endpoint,
            {"text": prompt},
            timeout_ms=self.timeout_ms,
            transport=self._transport,
            **kwargs,
        )
        try:
            vec = np.asarray(data["embedding"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"embedding response malformed: {exc}") from None
        if vec.shape != (self.dimension,):
            raise MalformedResponseError(
                f"embedding dimension {vec.shape} != expected ({self.dimension},)"
            )
        norm = float(np.linalg.norm(vec))
        if not np.isfinite(norm) or norm == 0.0:
            raise MalformedResponseError("embedding is zero or non-finite")
        return vec / norm


def default_embedder(name: str = "hashed-512") -> TextEmbedder:
    """Resolve an embedder by CLI-style name (currently hashed-<dim>)."""
    m = re.fullmatch(r"hashed-(\d+)", name)
    if not m:
        raise ValueError(f"unknown embedder {name!r}; expected hashed-<dimension>")
    return HashedBigramEmbedder(dimension=int(m.group(1)))
