"""Self-similar fractals with known dimensions: Cantor sets, Koch curves and
snowflakes, the Sierpinski gasket, and the Moran-equation solver that gives
their similarity dimension.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .geometry import DEFAULT_PRECISION, MAX_DIM, PointSet

DEFAULT_ATTRACTOR_CAP = 1 << 24
MORAN_XTOL = 1e-12


def _rotation_2d(degrees: float) -> np.ndarray:
    t = math.radians(degrees)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Similarity:
    """Contracting similarity x -> ratio * rotation @ x + offset."""

    ratio: float
    rotation: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ValueError(f"similarity ratio {self.ratio} is not a strict contraction")
        R = np.array(self.rotation, dtype=np.float64, ndmin=2)
        b = np.array(self.offset, dtype=np.float64).reshape(-1)
        if R.shape != (len(b), len(b)):
            raise ValueError("rotation and offset dimensions disagree")
        if not np.allclose(R.T @ R, np.eye(len(b)), rtol=0, atol=1e-9):
            raise ValueError("rotation is not orthogonal")
        R.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "offset", b)

    @classmethod
    def planar(cls, ratio: float, degrees: float = 0.0, offset=(0.0, 0.0)) -> "Similarity":
        return cls(ratio, _rotation_2d(degrees), np.asarray(offset, dtype=float))

    @classmethod
    def scaling(cls, ratio: float, offset) -> "Similarity":
        b = np.atleast_1d(np.asarray(offset, dtype=float))
        return cls(ratio, np.eye(len(b)), b)

    @property
    def n(self) -> int:
        return len(self.offset)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.ratio * (x @ self.rotation.T) + self.offset

    def fixed_point(self) -> np.ndarray:
        # (I - ratio R) x = b is invertible because ratio < 1
        return np.linalg.solve(np.eye(self.n) - self.ratio * self.rotation, self.offset)


@dataclass(frozen=True)
class IteratedFunctionSystem:
    maps: tuple[Similarity, ...]
    label: str = ""
    ambient_dim: int = field(default=0)

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        n = maps[0].n
        if any(f.n != n for f in maps):
            raise ValueError("all maps must share the ambient dimension")
        if self.ambient_dim not in (0, n):
            raise ValueError("ambient_dim does not match the maps")
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "ambient_dim", n)

    @property
    def ratios(self) -> list[float]:
        return [f.ratio for f in self.maps]


class AttractorCapError(ValueError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"attractor needs {required} compositions, cap is {cap}; raise cap to at least {required}")
        self.required = required
        self.cap = cap


def attractor_values(ifs: IteratedFunctionSystem, depth: int, cap: int = DEFAULT_ATTRACTOR_CAP) -> np.ndarray:
    """Images of the seed under every length-``depth`` composition, as floats."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    required = len(ifs.maps) ** depth
    if required > cap:
        raise AttractorCapError(required, cap)
    pts = ifs.maps[0].fixed_point()[None, :]
    for _ in range(depth):
        pts = np.concatenate([f(pts) for f in ifs.maps])
    return pts


def attractor(
    ifs: IteratedFunctionSystem,
    depth: int,
    precision: int = DEFAULT_PRECISION,
    cap: int = DEFAULT_ATTRACTOR_CAP,
) -> PointSet:
    """Deterministic depth-k approximation of the IFS attractor."""
    return PointSet.from_values(attractor_values(ifs, depth, cap), precision, ifs.label)


def cantor_ifs(ratio: float = 1 / 3) -> IteratedFunctionSystem:
    if not 0 < ratio < 0.5:
        raise ValueError("Cantor ratio must lie in (0, 1/2)")
    return IteratedFunctionSystem(
        (Similarity.scaling(ratio, [0.0]), Similarity.scaling(ratio, [1.0 - ratio])),
        label=f"cantor{ratio:.6g}",
    )


def cantor_set(ratio: float = 1 / 3, depth: int = 8, precision: int = DEFAULT_PRECISION) -> PointSet:
    """Left endpoints of the 2**depth surviving intervals."""
    ps = attractor(cantor_ifs(ratio), depth, precision)
    return ps.relabel(f"cantor{ratio:.6g}_d{depth}")


def sierpinski_ifs() -> IteratedFunctionSystem:
    h = math.sqrt(3) / 2
    corners = [(0.0, 0.0), (0.5, 0.0), (0.25, h / 2)]
    return IteratedFunctionSystem(tuple(Similarity.planar(0.5, 0, c) for c in corners), label="sierpinski")


def sierpinski(depth: int, precision: int = DEFAULT_PRECISION) -> PointSet:
    """Lower-left corners of the 3**depth sub-triangles of the unit gasket."""
    return attractor(sierpinski_ifs(), depth, precision).relabel(f"sierpinski_d{depth}")


def koch_curve_ifs() -> IteratedFunctionSystem:
    """Four maps of ratio 1/3 taking [0,1]x{0} onto the four Koch segments."""
    h = math.sqrt(3) / 6
    return IteratedFunctionSystem(
        (
            Similarity.planar(1 / 3, 0, (0.0, 0.0)),
            Similarity.planar(1 / 3, 60, (1 / 3, 0.0)),
            Similarity.planar(1 / 3, -60, (0.5, h)),
            Similarity.planar(1 / 3, 0, (2 / 3, 0.0)),
        ),
        label="koch_curve",
    )


def koch_curve(order: int, precision: int = DEFAULT_PRECISION) -> PointSet:
    """The 4**order segment start points of the Koch curve from (0,0) to (1,0)."""
    return attractor(koch_curve_ifs(), order, precision).relabel(f"koch_curve{order}")


def koch_snowflake_values(order: int, side: float = 0.5) -> np.ndarray:
    if not 1 <= order <= 8:
        raise ValueError("snowflake order must be in 1..8")
    curve = attractor_values(koch_curve_ifs(), order)
    h = math.sqrt(3) / 2 * side
    # clockwise traversal puts every bump on the outside of the triangle
    corners = np.array([[0.0, 0.0], [side / 2, h], [side, 0.0]]) - np.array([side / 2, h / 3])
    parts = []
    for k in range(3):
        a, b = corners[k], corners[(k + 1) % 3]
        d = b - a
        frame = np.array([[d[0], -d[1]], [d[1], d[0]]])  # maps (1,0) to d, scaled by |d|
        parts.append(curve @ frame.T + a)
    return np.concatenate(parts)


def koch_snowflake(order: int, side: float = 0.5, precision: int = DEFAULT_PRECISION) -> PointSet:
    """Vertices of the order-k Koch snowflake, centred on the origin.

    Three Koch curves are erected on the sides of an equilateral triangle of
    the given side length, giving 3 * 4**order distinct vertices.
    """
    return PointSet.from_values(koch_snowflake_values(order, side), precision, f"koch{order}")


def moran_solve(ratios: Sequence[float], n: int) -> tuple[float, bool]:
    """Root of sum(r_i**s) = 1 on [0, n]; the flag is True for overlapping systems."""
    r = np.asarray(ratios, dtype=np.float64)

    def g(s):
        return float(np.sum(r**s)) - 1.0

    if g(n) > 0:
        return float(n), True
    if g(0.0) <= 0:
        return 0.0, False
    return bisect(g, 0.0, float(n), xtol=MORAN_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200), False


def moran_dimension(ifs: IteratedFunctionSystem) -> float:
    """Similarity dimension of the IFS (capped at n for overlapping systems)."""
    return moran_solve(ifs.ratios, ifs.ambient_dim)[0]


def is_overlapping(ifs: IteratedFunctionSystem) -> bool:
    return moran_solve(ifs.ratios, ifs.ambient_dim)[1]


_KV = re.compile(r"(\w+)=(\S+)")


def _parse_number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad number {text!r}") from exc


def parse_ifs(text: str) -> IteratedFunctionSystem:
    """Read the plain-text IFS description.

    Example::

        dim 2
        label koch
        map ratio=1/3 rotate=0 offset=0,0
        map ratio=1/3 rotate=60 offset=1/3,0
    """
    n = None
    label = ""
    maps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "dim":
            n = int(rest)
            if not 1 <= n <= MAX_DIM:
                raise ValueError(f"line {lineno}: dim must be in 1..{MAX_DIM}")
        elif head == "label":
            label = rest
        elif head == "map":
            if n is None:
                raise ValueError(f"line {lineno}: 'dim' must precede maps")
            kv = dict(_KV.findall(rest))
            unknown = set(kv) - {"ratio", "rotate", "offset"}
            if unknown or "ratio" not in kv:
                raise ValueError(f"line {lineno}: expected ratio=, rotate=, offset= fields")
            ratio = _parse_number(kv["ratio"])
            if not 0 < ratio < 1:
                raise ValueError(f"line {lineno}: ratio {ratio} is not contracting")
            offset = [_parse_number(v) for v in kv.get("offset", ",".join(["0"] * n)).split(",")]
            if len(offset) != n:
                raise ValueError(f"line {lineno}: offset needs {n} components")
            deg = _parse_number(kv.get("rotate", "0"))
            if n == 2:
                rot = _rotation_2d(deg)
            elif deg % 360 == 0:
                rot = np.eye(n)
            elif n == 1 and deg % 360 == 180:
                rot = -np.eye(1)
            else:
                raise ValueError(f"line {lineno}: rotate is only supported in the plane")
            maps.append(Similarity(ratio, rot, np.array(offset)))
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    if not maps:
        raise ValueError("IFS file defines no maps")
    return IteratedFunctionSystem(tuple(maps), label)


def format_ifs(ifs: IteratedFunctionSystem) -> str:
    lines = [f"dim {ifs.ambient_dim}"]
    if ifs.label:
        lines.append(f"label {ifs.label}")
    for f in ifs.maps:
        if ifs.ambient_dim == 2:
            deg = math.degrees(math.atan2(f.rotation[1, 0], f.rotation[0, 0]))
        elif ifs.ambient_dim == 1:
            deg = 0.0 if f.rotation[0, 0] > 0 else 180.0
        else:
            if not np.allclose(f.rotation, np.eye(ifs.ambient_dim)):
                raise ValueError("only planar rotations can be written")
            deg = 0.0
        off = ",".join(repr(float(v)) for v in f.offset)
        lines.append(f"map ratio={f.ratio!r} rotate={deg!r} offset={off}")
    return "\n".join(lines) + "\n"


def named_fractal(name: str, depth: int, precision: int = DEFAULT_PRECISION, ratio: float = 1 / 3) -> PointSet:
    """Build one of the built-in fractals by name."""
    if name == "koch":
        return koch_snowflake(depth, precision=precision)
    if name == "koch_curve":
        return koch_curve(depth, precision)
    if name == "cantor":
        return cantor_set(ratio, depth, precision)
    if name == "sierpinski":
        return sierpinski(depth, precision)
    raise ValueError(f"unknown fractal {name!r}; choose koch, koch_curve, cantor or sierpinski")
