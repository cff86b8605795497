"""Point-cloud files and atomic writes.

Binary layout (little-endian)::

    b"FDIM1"  u8 ambient_dim  u8 precision  u64 count  count*n i64 mantissas
    [optional trailer]  b"FDIMCFG"  u32 length  <length bytes of UTF-8 JSON>

The trailer carries the run configuration that produced the file.  Readers
that only know the core layout can stop after the mantissas.

The CSV form has a header ``x1,...,xn`` followed by one exact decimal row per
point; lines starting with ``#`` are comments (the first one holds the JSON
provenance record and the precision).
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from decimal import Decimal
from pathlib import Path

import numpy as np

from .geometry import MAX_DIM, MAX_SET_PRECISION, PointSet, WorkspaceError

MAGIC = b"FDIM1"
TRAILER_MAGIC = b"FDIMCFG"
_HEADER = struct.Struct("<5sBBQ")


class FormatError(ValueError):
    pass


def atomic_write_bytes(path, data: bytes) -> None:
    """Write to a temporary sibling then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def encode_pointset(points: PointSet, provenance: dict | None = None) -> bytes:
    head = _HEADER.pack(MAGIC, points.ambient_dim, points.precision, len(points))
    body = np.ascontiguousarray(points.mantissas, dtype="<i8").tobytes()
    if provenance is None:
        return head + body
    blob = json.dumps(provenance, separators=(",", ":")).encode("utf-8")
    return head + body + TRAILER_MAGIC + struct.pack("<I", len(blob)) + blob


def decode_pointset(data: bytes, label: str = "") -> tuple[PointSet, dict | None]:
    if len(data) < _HEADER.size:
        raise FormatError("truncated point-cloud header")
    magic, n, p, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError("bad magic: not an FDIM1 point cloud")
    if not 1 <= n <= MAX_DIM:
        raise FormatError(f"ambient dimension {n} outside 1..{MAX_DIM}")
    if p > MAX_SET_PRECISION:
        raise FormatError(f"precision {p} exceeds {MAX_SET_PRECISION}")
    end = _HEADER.size + 8 * n * count
    if len(data) < end:
        raise FormatError("truncated mantissa block")
    m = np.frombuffer(data, dtype="<i8", count=n * count, offset=_HEADER.size).reshape(count, n)
    if count > 1:
        rows = m.astype(np.int64)
        order_ok = np.lexsort(rows.T[::-1])
        if not np.array_equal(order_ok, np.arange(count)) or (np.diff(rows, axis=0) == 0).all(axis=1).any():
            raise FormatError("points not in canonical deduplicated order")
    provenance = None
    rest = data[end:]
    if rest:
        if not rest.startswith(TRAILER_MAGIC) or len(rest) < len(TRAILER_MAGIC) + 4:
            raise FormatError("unexpected bytes after mantissa block")
        (length,) = struct.unpack_from("<I", rest, len(TRAILER_MAGIC))
        blob = rest[len(TRAILER_MAGIC) + 4 :]
        if len(blob) != length:
            raise FormatError("config trailer length mismatch")
        provenance = json.loads(blob.decode("utf-8"))
    if provenance and not label:
        label = str(provenance.get("label", ""))
    try:
        ps = PointSet(m.astype(np.int64), p, label, n)
    except WorkspaceError as exc:
        raise FormatError(str(exc)) from exc
    return ps, provenance


def write_pointset(path, points: PointSet, provenance: dict | None = None) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        atomic_write_text(path, pointset_to_csv(points, provenance))
    else:
        atomic_write_bytes(path, encode_pointset(points, provenance))


def read_pointset(path, label: str = "") -> tuple[PointSet, dict | None]:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return pointset_from_csv(path.read_text(encoding="utf-8"), label or path.stem)
    return decode_pointset(path.read_bytes(), label)


def _mantissa_to_decimal(m: int, p: int) -> str:
    # m / 2**p == m * 5**p / 10**p, so the decimal expansion is exact
    d = Decimal(int(m) * 5**p).scaleb(-p)
    text = format(d.normalize(), "f")
    return "0" if text in ("-0", "") else text


def pointset_to_csv(points: PointSet, provenance: dict | None = None) -> str:
    meta = {"precision": points.precision, "label": points.label}
    if provenance:
        meta["provenance"] = provenance
    lines = ["# " + json.dumps(meta, separators=(",", ":"))]
    lines.append(",".join(f"x{i + 1}" for i in range(points.ambient_dim)))
    for row in points.mantissas:
        lines.append(",".join(_mantissa_to_decimal(c, points.precision) for c in row))
    return "\n".join(lines) + "\n"


def pointset_from_csv(text: str, label: str = "") -> tuple[PointSet, dict | None]:
    meta: dict = {}
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if not meta and body.startswith("{"):
                meta = json.loads(body)
            continue
        if header is None:
            header = [h.strip() for h in line.split(",")]
            if header != [f"x{i + 1}" for i in range(len(header))]:
                raise FormatError("CSV header must be x1,...,xn")
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} values")
        rows.append(cells)
    if header is None:
        raise FormatError("CSV has no header row")
    n = len(header)
    if not 1 <= n <= MAX_DIM:
        raise FormatError(f"ambient dimension {n} outside 1..{MAX_DIM}")
    p = int(meta.get("precision", 30))
    scale = Decimal(2) ** p
    m = np.zeros((len(rows), n), dtype=np.int64)
    try:
        for i, cells in enumerate(rows):
            for j, c in enumerate(cells):
                v = Decimal(c.strip()) * scale
                m[i, j] = int(v.to_integral_value(rounding="ROUND_HALF_EVEN"))
    except (ArithmeticError, ValueError, OverflowError) as exc:
        raise FormatError(f"bad CSV value: {exc}") from exc
    try:
        ps = PointSet(m, p, label or str(meta.get("label", "")), n)
    except WorkspaceError as exc:
        raise FormatError(str(exc)) from exc
    return ps, meta.get("provenance")
