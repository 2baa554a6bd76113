"""File formats: EMB1 embeddings, CSV, JSON reports, key=value configs.

EMB1 binary layout (little-endian throughout):

    offset 0   4 bytes   magic b"EMB1"
    offset 4   u32       n, number of rows (> 0)
    offset 8   u32       dim, row width (> 0)
    offset 12  u8        label flag, 0 or 1
    offset 13  f32 * n * dim   row-major payload
    then, only if the flag is 1:
               i32 * n   ground-truth ids

Rows must be unit-norm within 1e-6; the reader validates and never
rescales, so a write/read round trip preserves the f32 payload bit for
bit. CSV files hold one instance per row of comma-separated reals (an
optional header may name the last column "label" to carry ids); CSV
rows are normalized on read.

JSON emitted here prints numbers with 17 significant digits and fixed
key order, so equal inputs serialize to identical bytes.
"""
from __future__ import annotations

import json
import math
import struct
import zipfile
from pathlib import Path

import numpy as np

from .dbscan import Clustering
from .distances import DistanceMatrix
from .embeddings import EmbeddingSet
from .errors import MalformedFileError, UnsupportedVersionError
from .selection import SelectionMask
from .silhouette import SilhouetteReport

MAGIC = b"EMB1"
HEADER_SIZE = 13
UNIT_NORM_TOL = 1e-6


# ---------------------------------------------------------------- JSON

def dumps_json(obj) -> str:
    """Serialize dicts/lists/scalars to JSON with 17-significant-digit floats.

    Non-finite floats become null. Key order is the dict insertion
    order, so output bytes are a pure function of the input.
    """
    parts: list[str] = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, parts: list):
    if obj is None:
        parts.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        parts.append(format(x, ".17g") if math.isfinite(x) else "null")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                parts.append(", ")
            parts.append(json.dumps(str(key)))
            parts.append(": ")
            _emit(value, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for i, value in enumerate(obj):
            if i:
                parts.append(", ")
            _emit(value, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(path, text: str):
    Path(path).write_text(text + "\n", encoding="utf-8")


def _load_json(path):
    raw = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise MalformedFileError(f"{path}: invalid JSON: {e.msg}", offset=e.pos) from e


# ---------------------------------------------------------------- EMB1

def write_embeddings(path, data, labels=None):
    """Write an EMB1 file.

    Args:
        data: EmbeddingSet or raw (n, dim) array; stored as f32.
        labels: optional int ids, one per row, stored as i32.
    """
    mat = data.data if isinstance(data, EmbeddingSet) else np.asarray(data, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-D matrix, got shape {getattr(mat, 'shape', None)}")
    n, dim = mat.shape
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<IIB", n, dim, 0 if labels is None else 1)
    blob += np.ascontiguousarray(mat, dtype="<f4").tobytes()
    if labels is not None:
        lab = np.asarray(labels)
        if lab.shape != (n,):
            raise ValueError(f"labels shape {lab.shape} does not match n={n}")
        info = np.iinfo(np.int32)
        if lab.min() < info.min or lab.max() > info.max:
            raise ValueError("labels do not fit in 32-bit integers")
        blob += np.ascontiguousarray(lab, dtype="<i4").tobytes()
    Path(path).write_bytes(bytes(blob))


def read_embeddings(path, unit_norm: bool = True):
    """Read an EMB1 or CSV file into (EmbeddingSet, labels or None).

    Files ending in .csv are parsed as CSV (and normalized); anything
    else must be EMB1. With unit_norm False the EMB1 norm check is
    skipped and a raw matrix is returned instead of an EmbeddingSet.
    """
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return _read_csv(p)
    return _read_emb1(p, unit_norm=unit_norm)


def _read_emb1(path: Path, unit_norm: bool = True):
    blob = path.read_bytes()
    if len(blob) < HEADER_SIZE:
        raise MalformedFileError(f"{path}: truncated header", offset=len(blob))
    if blob[:4] != MAGIC:
        if blob[:3] == MAGIC[:3]:
            raise UnsupportedVersionError(
                f"{path}: unsupported format version {blob[:4]!r}", offset=3
            )
        raise MalformedFileError(f"{path}: bad magic {blob[:4]!r}", offset=0)
    n, dim, flag = struct.unpack_from("<IIB", blob, 4)
    if n == 0:
        raise MalformedFileError(f"{path}: zero rows", offset=4)
    if dim == 0:
        raise MalformedFileError(f"{path}: zero dimension", offset=8)
    if flag not in (0, 1):
        raise MalformedFileError(f"{path}: label flag must be 0 or 1, got {flag}", offset=12)
    payload = n * dim * 4
    expected = HEADER_SIZE + payload + (n * 4 if flag else 0)
    if len(blob) < expected:
        raise MalformedFileError(
            f"{path}: truncated, expected {expected} bytes, got {len(blob)}", offset=len(blob)
        )
    if len(blob) > expected:
        raise MalformedFileError(f"{path}: trailing bytes", offset=expected)

    mat = (
        np.frombuffer(blob, dtype="<f4", count=n * dim, offset=HEADER_SIZE)
        .reshape(n, dim)
        .astype(np.float64)
    )
    bad = np.flatnonzero(~np.isfinite(mat).all(axis=1))
    if bad.size:
        raise MalformedFileError(
            f"{path}: non-finite value in row {bad[0]}",
            offset=HEADER_SIZE + int(bad[0]) * dim * 4,
        )
    labels = None
    if flag:
        labels = np.frombuffer(
            blob, dtype="<i4", count=n, offset=HEADER_SIZE + payload
        ).astype(np.int64)
    if not unit_norm:
        return mat, labels
    norms = np.linalg.norm(mat, axis=1)
    off = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
    if off.size:
        raise MalformedFileError(
            f"{path}: row {off[0]} has norm {norms[off[0]]:.9g}, expected unit rows",
            offset=HEADER_SIZE + int(off[0]) * dim * 4,
        )
    return EmbeddingSet(mat), labels


# ----------------------------------------------------------------- CSV

def _read_csv(path: Path):
    from .embeddings import validate_and_normalize

    blob = path.read_bytes()
    text = blob.decode("utf-8")
    rows: list[list[str]] = []
    offsets: list[int] = []
    pos = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        if stripped:
            rows.append([cell.strip() for cell in stripped.split(",")])
            offsets.append(pos)
        pos += len(line.encode("utf-8"))
    if not rows:
        raise MalformedFileError(f"{path}: empty file", offset=0)

    has_labels = False
    start = 0
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        has_labels = rows[0][-1].lower() == "label"
        start = 1
        if len(rows) == 1:
            raise MalformedFileError(f"{path}: header without data rows", offset=len(blob))

    width = len(rows[start])
    data = []
    labels = []
    for r in range(start, len(rows)):
        cells = rows[r]
        if len(cells) != width:
            raise MalformedFileError(
                f"{path}: row {r} has {len(cells)} columns, expected {width}",
                offset=offsets[r],
            )
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise MalformedFileError(f"{path}: non-numeric cell in row {r}", offset=offsets[r])
        if has_labels:
            try:
                labels.append(int(cells[-1]))
            except ValueError:
                raise MalformedFileError(
                    f"{path}: label in row {r} is not an integer", offset=offsets[r]
                )
            values = values[:-1]
        data.append(values)

    mat = np.asarray(data, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64) if has_labels else None
    return validate_and_normalize(mat), lab


# ----------------------------------------------------- distance matrices

def write_distances(path, dist: DistanceMatrix):
    """Store a distance matrix as a .npz archive (keys: values, kind)."""
    with open(path, "wb") as fh:
        np.savez(fh, values=dist.values, kind=np.asarray(dist.kind))


def read_distances(path) -> DistanceMatrix:
    try:
        with np.load(path) as archive:
            values = np.asarray(archive["values"], dtype=np.float64)
            kind = str(archive["kind"])
    except (zipfile.BadZipFile, KeyError, OSError, ValueError) as e:
        raise MalformedFileError(f"{path}: not a distance archive: {e}", offset=0) from e
    return DistanceMatrix(values, kind)


# ------------------------------------------------------------ clusterings

def clustering_to_dict(clustering: Clustering) -> dict:
    return {
        "n": clustering.n,
        "K": clustering.K,
        "labels": clustering.labels.tolist(),
    }


def write_clustering(path, clustering: Clustering):
    _write_text(path, dumps_json(clustering_to_dict(clustering)))


def read_clustering(path) -> Clustering:
    doc = _load_json(path)
    try:
        n = int(doc["n"])
        k = int(doc["K"])
        labels = np.asarray(doc["labels"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFileError(f"{path}: bad clustering document: {e}", offset=0) from e
    if labels.ndim != 1 or labels.size != n:
        raise MalformedFileError(f"{path}: labels length does not match n", offset=0)
    try:
        return Clustering(labels=labels, K=k)
    except ValueError as e:
        raise MalformedFileError(f"{path}: inconsistent clustering: {e}", offset=0) from e


# ----------------------------------------------------------------- masks

def mask_to_dict(mask: SelectionMask) -> dict:
    return {
        "uncertainty": mask.uncertainty.tolist(),
        "selected": [bool(v) for v in mask.selected],
    }


def write_mask(path, mask: SelectionMask):
    _write_text(path, dumps_json(mask_to_dict(mask)))


# ------------------------------------------------------------ silhouettes

def silhouette_to_dict(report: SilhouetteReport, decomposed=()) -> dict:
    per_instance = [
        float(v) if math.isfinite(v) else None for v in report.per_instance
    ]
    return {
        "alpha": report.alpha,
        "per_cluster": report.per_cluster.tolist(),
        "per_instance": per_instance,
        "decomposed": [int(k) for k in decomposed],
    }


def write_silhouette(path, report: SilhouetteReport, decomposed=()):
    _write_text(path, dumps_json(silhouette_to_dict(report, decomposed)))


# ---------------------------------------------------------------- configs

def read_config(path) -> dict:
    """Parse a flat key=value config file into a str-to-str dict.

    Blank lines and lines starting with # are skipped.
    """
    blob = Path(path).read_bytes()
    out: dict[str, str] = {}
    pos = 0
    for line in blob.decode("utf-8").splitlines(keepends=True):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            if "=" not in stripped:
                raise MalformedFileError(
                    f"{path}: expected key=value, got {stripped!r}", offset=pos
                )
            key, _, value = stripped.partition("=")
            out[key.strip()] = value.strip()
        pos += len(line.encode("utf-8"))
    return out
