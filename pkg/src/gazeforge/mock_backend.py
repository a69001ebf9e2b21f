"""Standalone mock generation backend: ``python -m gazeforge.mock_backend``.

Serves the exact protocol of the in-process mock over HTTP, so integration
tests (and the UI) can exercise real network transport against a backend
whose outputs are byte-identical to the in-process one.
"""
from __future__ import annotations

import argparse
import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import BackendError
from .gateway import MockBackend
from .transport import canonical_json


class _MockHandler(BaseHTTPRequestHandler):
    backend = MockBackend()
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            request = json.loads(raw.decode("utf-8"))
            payload = self.backend.handle(request)
            status = 200
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            payload = {"error": f"bad request JSON: {exc}"}
            status = 400
        except BackendError as exc:
            payload = {"error": str(exc)}
            status = 400
        body = canonical_json(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_mock_server(host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), _MockHandler)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="standalone mock generation backend")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8188)
    args = parser.parse_args(argv)
    server = make_mock_server(args.host, args.port)
    host, port = server.server_address[:2]
    print(f"mock backend on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
