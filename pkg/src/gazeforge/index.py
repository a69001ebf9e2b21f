"""On-disk guidance index: prompt-embedding-saliency triples plus exact scan.

Index file layout (``index.gfi`` inside the index root):

    u32 LE header_length
    header_length bytes of UTF-8 JSON (sorted keys, no whitespace)
    count * dimension little-endian float32 embeddings, record order

so the embedding block for record i starts at
``4 + header_length + i * dimension * 4``. Saliency maps live as canonical
SMAP copies under ``<root>/maps/``, referenced by relative path from the
header. Ingestion is idempotent: identical input bytes produce an identical
index file.
"""
from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import TextEmbedder
from .errors import (
    EmptyDatasetError,
    FormatError,
    IndexMismatchError,
    IngestError,
)
from .formats import read_map_auto, smap_from_bytes, write_smap
from .maps import SaliencyMap

__all__ = ["GuidanceRecord", "GuidanceIndex", "ingest", "load_index", "scan"]

INDEX_FILENAME = "index.gfi"


@dataclass(frozen=True, eq=False)
class GuidanceRecord:
    id: int
    prompt: str
    embedding: np.ndarray
    map_path: str  # relative to the index root

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=np.float64)
        norm = float(np.linalg.norm(emb))
        if not math.isclose(norm, 1.0, abs_tol=1e-6):
            raise FormatError(f"record {self.id}: embedding norm {norm} is not 1 +- 1e-6")
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)


@dataclass(eq=False)
class GuidanceIndex:
    embedder_id: str
    records: tuple
    root: Path

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise FormatError(f"duplicate record id {rec.id}")
            seen.add(rec.id)
        self.root = Path(self.root)
        self._matrix = None
        self._by_id = {rec.id: rec for rec in self.records}

    def __len__(self) -> int:
        return len(self.records)

    @property
    def dimension(self) -> int:
        if not self.records:
            return 0
        return int(self.records[0].embedding.shape[0])

    def embedding_matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.stack([r.embedding for r in self.records])
        return self._matrix

    def record(self, record_id: int) -> GuidanceRecord:
        return self._by_id[record_id]

    def load_map(self, record_id: int) -> SaliencyMap:
        rec = self._by_id[record_id]
        return smap_from_bytes((self.root / rec.map_path).read_bytes())


def _index_path(path) -> Path:
    p = Path(path)
    return p / INDEX_FILENAME if p.is_dir() else p


def write_index(index: GuidanceIndex, root) -> Path:
    """Serialize an index under ``root`` (maps are assumed already in place)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    header = {
        "count": len(index.records),
        "dimension": index.dimension,
        "embedder_id": index.embedder_id,
        "records": [
            {"id": r.id, "map": r.map_path, "prompt": r.prompt} for r in index.records
        ],
        "version": 1,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob = b"".join(r.embedding.astype("<f4").tobytes() for r in index.records)
    out = root / INDEX_FILENAME
    out.write_bytes(struct.pack("<I", len(header_bytes)) + header_bytes + blob)
    return out


def load_index(path) -> GuidanceIndex:
    """Load an index from its root directory or the index file itself."""
    file_path = _index_path(path)
    try:
        payload = file_path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read index {file_path}: {exc}") from None
    if len(payload) < 4:
        raise FormatError(f"{file_path}: truncated index header length")
    (header_len,) = struct.unpack("<I", payload[:4])
    if len(payload) < 4 + header_len:
        raise FormatError(f"{file_path}: truncated index header")
    try:
        header = json.loads(payload[4 : 4 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{file_path}: bad index header: {exc}") from None
    count = int(header["count"])
    dim = int(header["dimension"])
    expected = 4 + header_len + count * dim * 4
    if len(payload) != expected:
        raise FormatError(
            f"{file_path}: embedding block length {len(payload) - 4 - header_len} "
            f"!= expected {count * dim * 4}"
        )
    embeddings = np.frombuffer(payload, dtype="<f4", offset=4 + header_len)
    embeddings = embeddings.reshape(count, dim).astype(np.float64)
    records = []
    for i, meta in enumerate(header["records"]):
        records.append(
            GuidanceRecord(
                id=int(meta["id"]),
                prompt=str(meta["prompt"]),
                embedding=embeddings[i],
                map_path=str(meta["map"]),
            )
        )
    return GuidanceIndex(
        embedder_id=str(header["embedder_id"]),
        records=tuple(records),
        root=file_path.parent,
    )


def ingest(manifest_path, embedder: TextEmbedder, out_dir) -> tuple:
    """Build an index from a JSON Lines manifest of {"prompt", "map"} pairs.

    Map paths resolve relative to the manifest. Each readable map is copied
    into ``out_dir/maps/<id>.smap`` in canonical SMAP form; ids run 0..n-1
    over the successfully ingested records in manifest order. Unreadable
    records are collected as warnings; ingestion aborts when failures exceed
    max(1, 1% of the manifest). Returns ``(index, warnings)``.
    """
    manifest_path = Path(manifest_path)
    out_dir = Path(out_dir)
    try:
        lines = manifest_path.read_text().splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read manifest {manifest_path}: {exc}")
    entries = []
    failures = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            entries.append((str(obj["prompt"]), str(obj["map"]), lineno))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            failures.append(f"{manifest_path}:{lineno}: bad manifest line: {exc}")
    total = len(entries) + len(failures)
    if total == 0:
        raise IngestError(f"{manifest_path}: empty manifest")

    (out_dir / "maps").mkdir(parents=True, exist_ok=True)
    records = []
    next_id = 0
    for prompt, map_ref, lineno in entries:
        src = Path(map_ref)
        if not src.is_absolute():
            src = manifest_path.parent / src
        try:
            smap = read_map_auto(src)
        except (FormatError, OSError) as exc:
            failures.append(f"{manifest_path}:{lineno}: {exc}")
            continue
        rel = f"maps/{next_id:08d}.smap"
        write_smap(smap, out_dir / rel)
        records.append(
            GuidanceRecord(
                id=next_id,
                prompt=prompt,
                embedding=embedder.embed(prompt),
                map_path=rel,
            )
        )
        next_id += 1

    budget = max(1.0, 0.01 * total)
    if len(failures) > budget:
        raise IngestError(
            f"{len(failures)}/{total} records failed (budget {budget:.0f})",
            failures=failures,
        )
    index = GuidanceIndex(
        embedder_id=embedder.embedder_id, records=tuple(records), root=out_dir
    )
    write_index(index, out_dir)
    return index, failures


def scan(index: GuidanceIndex, query_embedding: np.ndarray) -> np.ndarray:
    """Record ids sorted by ascending L2 distance to the query; exact linear
    scan, ties broken by lower id."""
    if len(index) == 0:
        raise EmptyDatasetError("guidance index is empty")
    query = np.asarray(query_embedding, dtype=np.float64)
    if query.shape != (index.dimension,):
        raise IndexMismatchError(
            f"query dimension {query.shape} != index dimension ({index.dimension},)"
        )
    diffs = index.embedding_matrix() - query
    distances = np.sqrt((diffs * diffs).sum(axis=1))
    ids = np.array([r.id for r in index.records])
    order = np.lexsort((ids, distances))
    return ids[order]
