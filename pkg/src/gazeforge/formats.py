"""On-disk interchange formats.

SMAP raster
    ``b"SMAP"``, u32 version=1, u32 width, u32 height, then width*height
    float32 values. All integers and floats little-endian, row-major,
    top-left origin. Round-trips bit-exactly.

Grayscale PNG
    Import maps [0, 255] to [0, 1]; export linearly rescales so the map's
    maximum lands on 255 (lossy by design, documented). The codec below is
    self-contained so encoded bytes are stable across environments; the
    decoder accepts 8-bit gray, gray+alpha, RGB and RGBA, non-interlaced.

Gaussian mixture JSON / fixation CSV
    Thin file wrappers over the canonical dict/record shapes.
"""
from __future__ import annotations

import csv
import io
import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidArgumentsError
from .maps import FixationSet, SaliencyMap
from .mixture import GaussianMixtureSpec, mixture_from_dict, mixture_to_dict

__all__ = [
    "smap_to_bytes",
    "smap_from_bytes",
    "write_smap",
    "read_smap",
    "encode_gray_png",
    "decode_png",
    "map_to_png_bytes",
    "map_from_png_bytes",
    "write_mixture_json",
    "read_mixture_json",
    "write_fixation_csv",
    "read_fixation_csv",
]

SMAP_MAGIC = b"SMAP"
SMAP_VERSION = 1

FIXATION_CSV_HEADER = ["subject_id", "timestamp_ms", "x_px", "y_px"]


# --------------------------------------------------------------------------
# SMAP binary raster
# --------------------------------------------------------------------------

def smap_to_bytes(smap: SaliencyMap) -> bytes:
    header = SMAP_MAGIC + struct.pack("<III", SMAP_VERSION, smap.width, smap.height)
    return header + smap.values.astype("<f4").tobytes()


def smap_from_bytes(payload: bytes) -> SaliencyMap:
    if len(payload) < 16:
        raise FormatError("SMAP payload truncated before header")
    if payload[:4] != SMAP_MAGIC:
        raise FormatError("bad SMAP magic")
    version, width, height = struct.unpack("<III", payload[4:16])
    if version != SMAP_VERSION:
        raise FormatError(f"unsupported SMAP version {version}")
    if width < 1 or height < 1:
        raise FormatError("SMAP dimensions must be >= 1")
    expected = 16 + 4 * width * height
    if len(payload) != expected:
        raise FormatError(
            f"SMAP payload length {len(payload)} != expected {expected} for {width}x{height}"
        )
    values = np.frombuffer(payload, dtype="<f4", offset=16).reshape(height, width)
    try:
        return SaliencyMap(values.astype(np.float64))
    except InvalidArgumentsError as exc:
        raise FormatError(f"SMAP values invalid: {exc}") from None


def write_smap(smap: SaliencyMap, path) -> None:
    Path(path).write_bytes(smap_to_bytes(smap))


def read_smap(path) -> SaliencyMap:
    return smap_from_bytes(Path(path).read_bytes())


# --------------------------------------------------------------------------
# PNG (8-bit, non-interlaced)
# --------------------------------------------------------------------------

def _png_chunk(tag: bytes, body: bytes) -> bytes:
    crc = zlib.crc32(tag + body) & 0xFFFFFFFF
    return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", crc)


def encode_gray_png(gray: np.ndarray) -> bytes:
    """Encode a (H, W) uint8 array as a deterministic grayscale PNG."""
    arr = np.asarray(gray)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise InvalidArgumentsError("encode_gray_png expects a (H, W) uint8 array")
    h, w = arr.shape
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    raw = b"".join(b"\x00" + arr[y].tobytes() for y in range(h))
    idat = zlib.compress(raw, 6)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", idat)
        + _png_chunk(b"IEND", b"")
    )


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def decode_png(payload: bytes) -> np.ndarray:
    """Decode an 8-bit non-interlaced PNG to a (H, W, C) uint8 array.

    C is 1, 2, 3 or 4 for gray, gray+alpha, RGB, RGBA.
    """
    if payload[:8] != b"\x89PNG\r\n\x1a\n":
        raise FormatError("not a PNG (bad signature)")
    pos = 8
    ihdr = None
    idat = io.BytesIO()
    while pos + 8 <= len(payload):
        (length,) = struct.unpack(">I", payload[pos : pos + 4])
        tag = payload[pos + 4 : pos + 8]
        body = payload[pos + 8 : pos + 8 + length]
        if len(body) != length:
            raise FormatError("PNG chunk truncated")
        pos += 12 + length
        if tag == b"IHDR":
            ihdr = struct.unpack(">IIBBBBB", body)
        elif tag == b"IDAT":
            idat.write(body)
        elif tag == b"IEND":
            break
    if ihdr is None:
        raise FormatError("PNG missing IHDR")
    w, h, depth, color_type, _comp, _filt, interlace = ihdr
    if depth != 8:
        raise FormatError(f"unsupported PNG bit depth {depth}")
    if interlace != 0:
        raise FormatError("interlaced PNG not supported")
    channels = {0: 1, 2: 3, 4: 2, 6: 4}.get(color_type)
    if channels is None:
        raise FormatError(f"unsupported PNG color type {color_type}")
    try:
        raw = zlib.decompress(idat.getvalue())
    except zlib.error as exc:
        raise FormatError(f"PNG IDAT corrupt: {exc}") from None
    stride = w * channels
    if len(raw) != h * (stride + 1):
        raise FormatError("PNG pixel data length mismatch")
    out = np.zeros((h, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(h):
        ftype = raw[y * (stride + 1)]
        line = bytearray(raw[y * (stride + 1) + 1 : (y + 1) * (stride + 1)])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(channels, stride):
                line[i] = (line[i] + line[i - channels]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                left = line[i - channels] if i >= channels else 0
                line[i] = (line[i] + ((left + int(prev[i])) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                left = line[i - channels] if i >= channels else 0
                above_left = int(prev[i - channels]) if i >= channels else 0
                line[i] = (line[i] + _paeth(left, int(prev[i]), above_left)) & 0xFF
        else:
            raise FormatError(f"unknown PNG filter type {ftype}")
        out[y] = np.frombuffer(bytes(line), dtype=np.uint8)
        prev = out[y]
    return out.reshape(h, w, channels)


def map_to_png_bytes(smap: SaliencyMap) -> bytes:
    """Export as 8-bit grayscale, linearly scaled so the map max hits 255.

    Lossy: quantized to 256 levels and the absolute scale is lost. An
    all-zero map exports as all-black.
    """
    peak = float(smap.values.max())
    if peak <= 0:
        gray = np.zeros((smap.height, smap.width), dtype=np.uint8)
    else:
        gray = np.floor(smap.values / peak * 255.0 + 0.5).astype(np.uint8)
    return encode_gray_png(gray)


def map_from_png_bytes(payload: bytes) -> SaliencyMap:
    """Import a PNG as saliency in [0, 1]; color inputs use Rec. 709 luminance."""
    pixels = decode_png(payload)
    channels = pixels.shape[2]
    if channels == 1:
        gray = pixels[:, :, 0].astype(np.float64)
    elif channels == 2:
        gray = pixels[:, :, 0].astype(np.float64)
    else:
        rgb = pixels[:, :, :3].astype(np.float64)
        gray = 0.2126 * rgb[:, :, 0] + 0.7152 * rgb[:, :, 1] + 0.0722 * rgb[:, :, 2]
    return SaliencyMap(gray / 255.0)


def read_map_auto(path) -> SaliencyMap:
    """Read a saliency map from SMAP or PNG, sniffing the magic bytes."""
    payload = Path(path).read_bytes()
    if payload[:4] == SMAP_MAGIC:
        return smap_from_bytes(payload)
    if payload[:8] == b"\x89PNG\r\n\x1a\n":
        return map_from_png_bytes(payload)
    raise FormatError(f"{path}: neither SMAP nor PNG")


# --------------------------------------------------------------------------
# Gaussian mixture JSON
# --------------------------------------------------------------------------

def write_mixture_json(spec: GaussianMixtureSpec, path) -> None:
    Path(path).write_text(json.dumps(mixture_to_dict(spec), indent=2) + "\n")


def read_mixture_json(path) -> GaussianMixtureSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    return mixture_from_dict(data)


# --------------------------------------------------------------------------
# Fixation CSV (ppd travels out-of-band)
# --------------------------------------------------------------------------

def write_fixation_csv(fixations: FixationSet, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIXATION_CSV_HEADER)
        for subject, t, x, y in fixations.records:
            writer.writerow([subject, repr(t), repr(x), repr(y)])


def parse_fixation_csv(text: str, display_ppd: float, source: str = "<csv>") -> FixationSet:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError(f"{source}: empty fixation CSV") from None
    if [c.strip() for c in header] != FIXATION_CSV_HEADER:
        raise FormatError(f"{source}: expected header {','.join(FIXATION_CSV_HEADER)}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise FormatError(f"{source}:{lineno}: expected 4 columns")
        try:
            records.append((row[0], float(row[1]), float(row[2]), float(row[3])))
        except ValueError as exc:
            raise FormatError(f"{source}:{lineno}: {exc}") from None
    try:
        return FixationSet(records=tuple(records), display_ppd=display_ppd)
    except InvalidArgumentsError as exc:
        raise FormatError(f"{source}: {exc}") from None


def read_fixation_csv(path, display_ppd: float) -> FixationSet:
    return parse_fixation_csv(Path(path).read_text(), display_ppd, source=str(path))
