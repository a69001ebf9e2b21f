"""The ``gazeforge`` command line.

Subcommands map 1:1 onto library operations and share code with the HTTP
service, so identical inputs produce identical outputs through either
surface. Results go to stdout as canonical JSON (or to ``--out`` files);
exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import os as _os

for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    _os.environ.setdefault(_var, "1")
_os.environ.setdefault("OMP_WAIT_POLICY", "PASSIVE")

import argparse
import base64
import json
import sys
from pathlib import Path

from .config import load_config_file, resolve_setting
from .correction import CorrectionOptions, author_suppression, correct
from .display import DISPLAY_PRESETS, DisplayConfig, EccentricityProfile, retarget
from .embedding import default_embedder
from .errors import GazeForgeError
from .formats import (
    read_fixation_csv,
    read_map_auto,
    read_mixture_json,
    write_mixture_json,
    write_smap,
)
from .gateway import BackendConfig, GenerationClient, GenerationRequest
from .index import ingest as ingest_corpus
from .index import load_index
from .metrics import evaluate_pair, mean_reports, pooled_metrics
from .mixture import mixture_to_dict, render_mixture
from .transport import canonical_json
from .video import evaluate_sequence, read_sseq

__all__ = ["main"]


class _UsageError(Exception):
    """Bad flag combination: print the contract and exit 2 like argparse."""


def _print_json(payload: dict) -> None:
    sys.stdout.write(canonical_json(payload).decode("utf-8") + "\n")


def _is_png(path) -> bool:
    return Path(path).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def _settings(args):
    file_values = load_config_file(args.config) if args.config else None

    def get(key, flag=None):
        return resolve_setting(key, flag, file_values)

    return get


def _load_display(name_or_path: str) -> DisplayConfig:
    if name_or_path in DISPLAY_PRESETS:
        return DISPLAY_PRESETS[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        return DisplayConfig.from_dict(json.loads(path.read_text()))
    raise GazeForgeError(
        f"unknown display {name_or_path!r}; presets: {', '.join(sorted(DISPLAY_PRESETS))}"
    )


def _parse_region(text: str):
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        x, y = chunk.split(",")
        points.append((float(x), float(y)))
    return points


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_render(args, get) -> None:
    spec = read_mixture_json(args.spec)
    rendered = render_mixture(spec, args.w, args.h)
    if args.out:
        write_smap(rendered, args.out)
        _print_json({"out": str(args.out), "w": args.w, "h": args.h})
    else:
        from .formats import smap_to_bytes

        _print_json({"smapB64": base64.b64encode(smap_to_bytes(rendered)).decode("ascii")})


def cmd_eval(args, get) -> None:
    if args.batch:
        _eval_batch(args, get)
        return
    if not args.target or not args.achieved:
        raise _UsageError("eval needs --target and --achieved (or --batch)")
    target = read_map_auto(args.target)
    achieved = read_map_auto(args.achieved)
    fixations = None
    if args.fixations:
        fixations = read_fixation_csv(args.fixations, display_ppd=float(get("ppd", args.ppd)))
    _print_json(evaluate_pair(target, achieved, fixations, args.epsilon).to_dict())


def _eval_batch(args, get) -> None:
    manifest = json.loads(Path(args.batch).read_text())
    base = Path(args.batch).parent
    items = []
    reports = []
    for entry in manifest:
        target = read_map_auto(base / entry["target"])
        achieved = read_map_auto(base / entry["achieved"])
        fixations = None
        if entry.get("fixations"):
            ppd = float(entry.get("ppd", get("ppd", args.ppd)))
            fixations = read_fixation_csv(base / entry["fixations"], display_ppd=ppd)
        items.append((target, achieved, fixations))
        reports.append(evaluate_pair(target, achieved, fixations, args.epsilon))
    mean, std = mean_reports(reports)
    _print_json(
        {
            "items": [r.to_dict() for r in reports],
            "mean": mean.to_dict(),
            "std": std.to_dict(),
            "pooled": pooled_metrics(items).to_dict(),
        }
    )


def cmd_eval_video(args, get) -> None:
    target = read_sseq(args.target)
    achieved = read_sseq(args.achieved)
    _print_json(evaluate_sequence(target, achieved).to_dict())


def cmd_ingest(args, get) -> None:
    embedder = default_embedder(get("embedder", args.embedder))
    index, warnings = ingest_corpus(args.manifest, embedder, args.out)
    _print_json(
        {
            "out": str(args.out),
            "records": len(index),
            "embedderId": index.embedder_id,
            "warnings": warnings,
        }
    )


def cmd_correct(args, get) -> None:
    spec = read_mixture_json(args.spec)
    index_path = get("index", args.index)
    if not index_path:
        raise _UsageError("correct needs --index (or GAZEFORGE_INDEX / config key index)")
    index = load_index(index_path)
    embedder = default_embedder(get("embedder", args.embedder))
    opts = CorrectionOptions.from_dict(
        json.loads(Path(args.options).read_text()) if args.options else {}
    )
    if args.free_means:
        opts.free_means = True
    result = correct(spec, args.prompt, index, embedder, opts)
    if args.out:
        write_mixture_json(result.corrected_spec, args.out)
    if args.map:
        corrected = render_mixture(
            result.corrected_spec,
            result.reference_map.width,
            result.reference_map.height,
        )
        write_smap(corrected, args.map)
    _print_json(result.to_dict())


def cmd_author_suppress(args, get) -> None:
    spec = read_mixture_json(args.spec)
    out = author_suppression(
        spec, _parse_region(args.region), mode=args.mode, attenuation=args.attenuation
    )
    if args.out:
        write_mixture_json(out, args.out)
        _print_json({"out": str(args.out), "components": len(out)})
    else:
        _print_json(mixture_to_dict(out))


def cmd_retarget(args, get) -> None:
    target = read_map_auto(args.target)
    display = _load_display(get("display", args.display))
    profile = EccentricityProfile(
        band_deg=tuple(float(v) for v in args.band.split(",")),
        falloff_deg=args.falloff,
    )
    out = retarget(target, display, profile, mode=args.mode, lam=args.lam)
    write_smap(out, args.out)
    _print_json({"out": str(args.out), "mode": args.mode})


def cmd_generate(args, get) -> None:
    conditioning = read_map_auto(args.conditioning)
    peak = float(conditioning.values.max())
    if peak > 1.0:  # gateway convention: [0, 1] max-normalized conditioning
        from .maps import max_normalize

        conditioning = max_normalize(conditioning)
    client = GenerationClient(
        BackendConfig(endpoint=get("backend", args.backend), timeout_ms=int(get("timeout_ms")))
    )
    request = GenerationRequest(
        prompt=args.prompt,
        conditioning=conditioning,
        width=args.width,
        height=args.height,
        seed=args.seed,
        steps=args.steps,
    )
    response = client.generate(request)
    payload = {"backendId": response.backend_id, "elapsedMs": response.elapsed_ms}
    if args.out:
        Path(args.out).write_bytes(response.image_bytes)
        payload["out"] = str(args.out)
    else:
        payload["imageB64"] = base64.b64encode(response.image_bytes).decode("ascii")
    _print_json(payload)


def cmd_serve(args, get) -> None:
    from .service import ServiceConfig, serve

    config = ServiceConfig(
        host=get("host", args.host),
        port=int(get("port", args.port)),
        data_dir=get("data_dir", args.data_dir),
        index_path=get("index", args.index),
        embedder_name=get("embedder", args.embedder),
        backend=BackendConfig(
            endpoint=get("backend", args.backend), timeout_ms=int(get("timeout_ms"))
        ),
        cors_origin=get("cors_origin", args.cors_origin),
    )
    serve(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazeforge",
        description="Author, correct, retarget and evaluate saliency conditioning maps.",
    )
    parser.add_argument("--config", help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a Gaussian mixture spec to an SMAP raster")
    p.add_argument("--spec", required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("eval", help="compare target and achieved saliency maps")
    p.add_argument("--target")
    p.add_argument("--achieved")
    p.add_argument("--fixations", help="fixation CSV for AUC/NSS")
    p.add_argument("--ppd", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--batch", help="JSON manifest of {target, achieved, fixations?} entries")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("eval-video", help="frame-wise sequence comparison")
    p.add_argument("--target", required=True)
    p.add_argument("--achieved", required=True)
    p.set_defaults(fn=cmd_eval_video)

    p = sub.add_parser("ingest", help="build a guidance index from a JSONL manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embedder", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("correct", help="retrieve a reference and align the authored mixture")
    p.add_argument("--spec", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--index", default=None)
    p.add_argument("--embedder", default=None)
    p.add_argument("--free-means", action="store_true")
    p.add_argument("--options", help="CorrectionOptions JSON file")
    p.add_argument("--out", help="write the corrected spec JSON here")
    p.add_argument("--map", help="render the corrected spec to this SMAP path")
    p.set_defaults(fn=cmd_correct)

    p = sub.add_parser("author-suppress", help="suppress attention inside a polygon region")
    p.add_argument("--spec", required=True)
    p.add_argument("--region", required=True, help='vertices "x,y;x,y;..."')
    p.add_argument("--mode", choices=("absolute", "relative"), required=True)
    p.add_argument("--attenuation", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_author_suppress)

    p = sub.add_parser("retarget", help="display-adaptive saliency retargeting")
    p.add_argument("--target", required=True)
    p.add_argument("--display", default=None, help="preset name or JSON file")
    p.add_argument("--mode", choices=("weight", "transform"), default="weight")
    p.add_argument("--band", default="7,10", help="preferred eccentricity band, degrees")
    p.add_argument("--falloff", type=float, default=15.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_retarget)

    p = sub.add_parser("generate", help="send a conditioning map to a generation backend")
    p.add_argument("--prompt", required=True)
    p.add_argument("--conditioning", required=True, help="SMAP or PNG saliency map")
    p.add_argument("--backend", default=None, help="mock: or http(s)://...")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--out", help="write the returned PNG here")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None, help="session persistence directory")
    p.add_argument("--index", default=None)
    p.add_argument("--embedder", default=None)
    p.add_argument("--backend", default=None)
    p.add_argument("--cors-origin", default=None)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    get = _settings(args)
    try:
        args.fn(args, get)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except GazeForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
