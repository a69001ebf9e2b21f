"""HTTP JSON transport with the shared retry policy.

All remote calls in the package (generation backend, embedding service) go
through :func:`post_json`: canonical JSON bytes out, parsed JSON back, and
3 retries with 0.5/1/2 s exponential backoff on transient transport
failures. Application-level errors reported by the backend are not retried.
"""
from __future__ import annotations

import json
import time
import urllib.error
import urllib.request

from .errors import BackendError, BackendUnreachableError, MalformedResponseError

__all__ = ["canonical_json", "post_json", "TransientTransportError", "RETRY_BACKOFF_S"]

RETRY_BACKOFF_S = (0.5, 1.0, 2.0)


class TransientTransportError(Exception):
    """Raised by transports for failures worth retrying (socket/5xx/timeout)."""


def canonical_json(payload: dict) -> bytes:
    """Stable protocol bytes: sorted keys, no whitespace, UTF-8."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def http_post(url: str, payload: dict, timeout_ms: int, headers: dict | None = None) -> dict:
    """Single POST of canonical JSON; raises TransientTransportError on
    connection trouble or 5xx, BackendError on 4xx."""
    req = urllib.request.Request(
        url,
        data=canonical_json(payload),
        headers={"Content-Type": "application/json", **(headers or {})},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req, timeout=timeout_ms / 1000.0) as resp:
            body = resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code >= 500:
            raise TransientTransportError(f"{url}: HTTP {exc.code}") from None
        detail = ""
        try:
            detail = exc.read().decode("utf-8", "replace")
        except Exception:
            pass
        raise BackendError(f"{url}: HTTP {exc.code} {detail}".strip()) from None
    except (urllib.error.URLError, TimeoutError, OSError) as exc:
        raise TransientTransportError(f"{url}: {exc}") from None
    try:
        return json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResponseError(f"{url}: response is not JSON: {exc}") from None


def post_json(
    url: str,
    payload: dict,
    timeout_ms: int = 30_000,
    headers: dict | None = None,
    transport=None,
    sleep=time.sleep,
) -> dict:
    """POST with retries. ``transport(payload) -> dict`` overrides HTTP for
    in-process backends and fault injection; ``sleep`` is injectable so tests
    do not wait out the backoff."""
    send = transport if transport is not None else (
        lambda body: http_post(url, body, timeout_ms, headers)
    )
    last_error = None
    for attempt, backoff in enumerate((*RETRY_BACKOFF_S, None)):
        try:
            return send(payload)
        except TransientTransportError as exc:
            last_error = exc
            if backoff is None:
                break
            sleep(backoff)
    raise BackendUnreachableError(
        f"backend unreachable after {len(RETRY_BACKOFF_S) + 1} attempts: {last_error}"
    )
