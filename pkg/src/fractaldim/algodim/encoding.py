"""Precision-r bit encodings of points in the unit cube."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import Point

SCHEMES = ("interleaved", "concatenated")


@dataclass(frozen=True)
class BitEncoding:
    bits: str
    precision: int
    ambient_dim: int
    scheme: str = "interleaved"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if len(self.bits) != self.precision * self.ambient_dim:
            raise ValueError("encoding length must equal n * r")

    def __len__(self) -> int:
        return len(self.bits)


def _coordinate_bits(point: Point, r: int) -> list[str]:
    shift = point.precision - r
    return [format(c >> shift, "b").zfill(r) if r else "" for c in point.coords]


def encode(point: Point, r: int, scheme: str = "interleaved") -> BitEncoding:
    """First r binary digits of every coordinate.

    ``interleaved`` emits digit j of every coordinate before digit j+1 of
    any, so nearby points share long prefixes; ``concatenated`` writes the
    coordinates one after another.
    """
    if r < 0 or r > point.precision:
        raise ValueError("scale beyond stored precision")
    if any(c < 0 or c >= (1 << point.precision) for c in point.coords):
        raise ValueError("normalize to unit cube first")
    cols = _coordinate_bits(point, r)
    if scheme == "concatenated" or point.n == 1:
        bits = "".join(cols)
    elif scheme == "interleaved":
        grid = np.frombuffer("".join(cols).encode("ascii"), dtype=np.uint8).reshape(point.n, r)
        bits = grid.T.tobytes().decode("ascii")
    else:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return BitEncoding(bits, r, point.n, scheme)


def decode(enc: BitEncoding) -> tuple[int, ...]:
    """Dyadic cell index (per axis) at scale r described by the encoding."""
    n, r = enc.ambient_dim, enc.precision
    if r == 0:
        return (0,) * n
    if enc.scheme == "interleaved":
        cols = [enc.bits[j::n] for j in range(n)]
    else:
        cols = [enc.bits[j * r : (j + 1) * r] for j in range(n)]
    return tuple(int(c, 2) for c in cols)


def joint_point(x: Point, y: Point) -> Point:
    """The point (x, y) in the product space, at the finer of the two precisions."""
    p = max(x.precision, y.precision)
    return x.with_precision(p).concat(y.with_precision(p))
