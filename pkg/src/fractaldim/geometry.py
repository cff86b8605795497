"""Dyadic fixed-point points and finite point sets.

Coordinates are stored as signed integer mantissas at a fixed precision ``p``
(value = mantissa * 2**-p).  Grid cells, translations and encodings are then
exact integer operations, so box counts and bit encodings are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRECISION = 30
MAX_DIM = 4
# |mantissa| <= 2**31 for stored point sets (int64 storage, workspace [-2, 2]^n at p = 30)
WORKSPACE_BITS = 31
MAX_SET_PRECISION = 32
DEFAULT_PRODUCT_CAP = 10**8


class WorkspaceError(ValueError):
    """A coordinate left the bounded workspace."""


class ProductTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """A single point with arbitrary-precision dyadic coordinates.

    Unlike :class:`PointSet`, a ``Point`` is not limited to int64 mantissas:
    algorithmic-dimension estimates need thousands of bits per coordinate.
    """

    coords: tuple[int, ...]
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not 1 <= len(self.coords) <= MAX_DIM:
            raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}")
        if self.precision < 0:
            raise ValueError("precision must be nonnegative")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def from_values(cls, values: Sequence, precision: int = DEFAULT_PRECISION) -> "Point":
        """Round real (or Fraction) coordinates to nearest, ties to even."""
        return cls(tuple(_round_half_even(Fraction(v) * (1 << precision)) for v in values), precision)

    def values(self) -> tuple[float, ...]:
        return tuple(c / (1 << self.precision) for c in self.coords)

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, 1 << self.precision) for c in self.coords)

    def with_precision(self, precision: int) -> "Point":
        """Re-express at a higher precision (exact) or lower precision (floor)."""
        shift = precision - self.precision
        if shift >= 0:
            return Point(tuple(c << shift for c in self.coords), precision)
        return Point(tuple(c >> -shift for c in self.coords), precision)

    def concat(self, other: "Point") -> "Point":
        if other.precision != self.precision:
            raise ValueError("points must share precision")
        return Point(self.coords + other.coords, self.precision)


def _round_half_even(x: Fraction) -> int:
    return round(x)  # Fraction.__round__ rounds half to even


def dyadic_cell(point: Point, r: int) -> tuple[int, ...]:
    """Index of the half-open dyadic cube of side 2**-r containing ``point``."""
    if r > point.precision:
        raise ValueError("scale beyond stored precision")
    if r < 0:
        raise ValueError("scale must be nonnegative")
    shift = point.precision - r
    return tuple(c >> shift for c in point.coords)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite, deduplicated, lexicographically sorted set of dyadic points.

    ``mantissas`` is an ``(N, n)`` int64 array; the constructor canonicalises
    it (sorted unique rows) and freezes it.
    """

    mantissas: np.ndarray
    precision: int = DEFAULT_PRECISION
    label: str = ""
    ambient_dim: int = field(default=0)

    def __post_init__(self):
        m = np.asarray(self.mantissas)
        if m.ndim == 1:
            m = m.reshape(-1, 1) if self.ambient_dim in (0, 1) else m.reshape(-1, self.ambient_dim)
        if m.ndim != 2:
            raise ValueError("mantissas must be a 2-D array")
        n = m.shape[1] if self.ambient_dim == 0 else self.ambient_dim
        if m.shape[1] != n:
            raise ValueError("mantissa rows do not match ambient_dim")
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}")
        if not 0 <= self.precision <= MAX_SET_PRECISION:
            raise ValueError(f"point-set precision must be in 0..{MAX_SET_PRECISION}")
        if m.size and not np.issubdtype(m.dtype, np.integer):
            raise TypeError("mantissas must be integers; use PointSet.from_values for reals")
        m = m.astype(np.int64, copy=False)
        if m.size and np.abs(m).max() > (1 << WORKSPACE_BITS):
            raise WorkspaceError("coordinate outside bounded workspace")
        if len(m) > 1:
            m = np.unique(m, axis=0)
        else:
            m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mantissas", m)
        object.__setattr__(self, "ambient_dim", n)

    @classmethod
    def from_values(cls, values, precision: int = DEFAULT_PRECISION, label: str = "") -> "PointSet":
        """Round float coordinates to the dyadic grid (nearest, ties to even)."""
        a = np.asarray(values, dtype=np.float64)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        scaled = np.ldexp(a, precision)
        if a.size and np.abs(scaled).max() > (1 << WORKSPACE_BITS):
            raise WorkspaceError("coordinate outside bounded workspace")
        return cls(np.rint(scaled).astype(np.int64), precision, label, a.shape[1])

    @classmethod
    def empty(cls, ambient_dim: int, precision: int = DEFAULT_PRECISION, label: str = "") -> "PointSet":
        return cls(np.zeros((0, ambient_dim), dtype=np.int64), precision, label, ambient_dim)

    @classmethod
    def from_points(cls, points: Iterable[Point], label: str = "") -> "PointSet":
        pts = list(points)
        if not pts:
            raise ValueError("use PointSet.empty for an empty set")
        p = pts[0].precision
        if any(q.precision != p or q.n != pts[0].n for q in pts):
            raise ValueError("points must share precision and dimension")
        return cls(np.array([q.coords for q in pts], dtype=np.int64), p, label, pts[0].n)

    def __len__(self) -> int:
        return len(self.mantissas)

    def __iter__(self):
        for row in self.mantissas:
            yield Point(tuple(int(c) for c in row), self.precision)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.precision == other.precision
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.mantissas, other.mantissas)
        )

    def __hash__(self):
        return hash((self.precision, self.ambient_dim, self.mantissas.tobytes()))

    @property
    def values(self) -> np.ndarray:
        return np.ldexp(self.mantissas.astype(np.float64), -self.precision)

    def point(self, i: int) -> Point:
        return Point(tuple(int(c) for c in self.mantissas[i]), self.precision)

    def relabel(self, label: str) -> "PointSet":
        return _trusted(self.mantissas, self.precision, label)

    def subset(self, mask_or_index) -> "PointSet":
        return _trusted(self.mantissas[mask_or_index], self.precision, self.label, self.ambient_dim)

    def project(self, axes: Sequence[int]) -> "PointSet":
        return PointSet(self.mantissas[:, list(axes)], self.precision, self.label, len(axes))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if not len(self):
            raise ValueError("bounding box of empty set")
        return self.values.min(axis=0), self.values.max(axis=0)

    def center(self) -> np.ndarray:
        lo, hi = self.bounding_box()
        return (lo + hi) / 2


def _trusted(mantissas, precision, label, ambient_dim=None) -> PointSet:
    """Build a PointSet from rows already known to be sorted, unique and in range."""
    ps = object.__new__(PointSet)
    m = np.asarray(mantissas, dtype=np.int64)
    if m.flags.writeable:
        m.setflags(write=False)
    object.__setattr__(ps, "mantissas", m)
    object.__setattr__(ps, "precision", precision)
    object.__setattr__(ps, "label", label)
    object.__setattr__(ps, "ambient_dim", m.shape[1] if ambient_dim is None else ambient_dim)
    return ps


def diameter(s: PointSet) -> float:
    """Largest Euclidean distance between two points of the set."""
    if not len(s):
        raise ValueError("diameter of empty set")
    if len(s) == 1:
        return 0.0
    pts = s.mantissas.astype(np.float64)
    if s.ambient_dim == 1:
        return float(pts.max() - pts.min()) * 2.0**-s.precision
    if len(pts) > 64:
        from scipy.spatial import ConvexHull, QhullError

        try:
            pts = pts[ConvexHull(pts).vertices]
        except (QhullError, ValueError):
            pass  # degenerate hull: fall through to the full pairwise scan
    best = 0.0
    for start in range(0, len(pts), 2048):
        block = pts[start : start + 2048]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best) * 2.0**-s.precision


def cartesian_product(E: PointSet, F: PointSet, cap: int = DEFAULT_PRODUCT_CAP) -> PointSet:
    """All concatenated pairs (x, y) with x in E and y in F."""
    if E.precision != F.precision:
        raise ValueError("product factors must share precision")
    size = len(E) * len(F)
    if size > cap:
        raise ProductTooLarge(f"product too large: {size} points exceeds cap {cap}")
    n = E.ambient_dim + F.ambient_dim
    if n > MAX_DIM:
        raise ValueError(f"product dimension {n} exceeds {MAX_DIM}")
    left = np.repeat(E.mantissas, len(F), axis=0)
    right = np.tile(F.mantissas, (len(E), 1))
    # both factors are sorted and unique, so row-major pairing is already canonical
    label = f"{E.label}x{F.label}" if (E.label or F.label) else ""
    return _trusted(np.hstack([left, right]), E.precision, label, n)


def _as_mantissa_vector(z, s: PointSet) -> np.ndarray:
    if isinstance(z, Point):
        coords = z.with_precision(s.precision).coords
    else:
        arr = np.atleast_1d(np.asarray(z, dtype=np.float64))
        coords = tuple(_round_half_even(Fraction(float(x)) * (1 << s.precision)) for x in arr)
    if len(coords) != s.ambient_dim:
        raise ValueError("translation has wrong dimension")
    if any(abs(c) > (1 << (WORKSPACE_BITS + 1)) for c in coords):
        raise WorkspaceError("translation outside bounded workspace")
    return np.array(coords, dtype=np.int64)


def translate(F: PointSet, z) -> PointSet:
    """Shift every point by ``z`` (a Point, or reals rounded to precision p)."""
    shift = _as_mantissa_vector(z, F)
    return translate_mantissas(F, shift)


def translate_mantissas(F: PointSet, shift: np.ndarray) -> PointSet:
    shift = np.asarray(shift, dtype=np.int64)
    if not len(F):
        return F
    lo = F.mantissas.min(axis=0) + shift
    hi = F.mantissas.max(axis=0) + shift
    bound = 1 << WORKSPACE_BITS
    if lo.min() < -bound or hi.max() > bound:
        raise WorkspaceError("translation overflows bounded workspace")
    # a common shift preserves lexicographic order and uniqueness
    return _trusted(F.mantissas + shift, F.precision, F.label, F.ambient_dim)


@dataclass(frozen=True)
class RigidMotion:
    """x -> scale * rotation @ x + translation."""

    rotation: np.ndarray
    translation: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        R = np.array(self.rotation, dtype=np.float64, ndmin=2)
        t = np.array(self.translation, dtype=np.float64).reshape(-1)
        if R.shape != (len(t), len(t)):
            raise ValueError("rotation and translation dimensions disagree")
        if not np.allclose(R.T @ R, np.eye(len(t)), rtol=0, atol=1e-9):
            raise ValueError("rotation is not orthogonal")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def n(self) -> int:
        return len(self.translation)

    @classmethod
    def identity(cls, n: int) -> "RigidMotion":
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def planar(cls, angle: float, translation=(0.0, 0.0), scale: float = 1.0) -> "RigidMotion":
        c, s = math.cos(angle), math.sin(angle)
        return cls(np.array([[c, -s], [s, c]]), np.asarray(translation, dtype=float), scale)

    def is_isometry(self) -> bool:
        return self.scale == 1.0


def apply_motion(F: PointSet, motion: RigidMotion) -> PointSet:
    """Map each point to scale*R@x + t, rounded to nearest (ties to even)."""
    if motion.n != F.ambient_dim:
        raise ValueError("motion dimension does not match point set")
    if not len(F):
        return F
    if (
        motion.scale == 1.0
        and np.array_equal(motion.rotation, np.eye(motion.n))
        and not motion.translation.any()
    ):
        return F
    m = F.mantissas.astype(np.float64)
    moved = motion.scale * (m @ motion.rotation.T) + np.ldexp(motion.translation, F.precision)
    if np.abs(moved).max() > (1 << WORKSPACE_BITS):
        raise WorkspaceError("motion moves points outside bounded workspace")
    return PointSet(np.rint(moved).astype(np.int64), F.precision, F.label, F.ambient_dim)


def _row_ids(*blocks: np.ndarray) -> list[np.ndarray]:
    """Map integer rows of several arrays to shared dense ids (equal rows, equal ids)."""
    stacked = np.vstack(blocks)
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out, start = [], 0
    for b in blocks:
        out.append(inv[start : start + len(b)])
        start += len(b)
    return out


def _exact_within(diff_rows: np.ndarray, threshold_sq: Fraction) -> np.ndarray:
    return np.array(
        [sum(int(d) * int(d) for d in row) <= threshold_sq for row in diff_rows], dtype=bool
    )


def within_distance(diffs: np.ndarray, delta: float, precision: int) -> np.ndarray:
    """Exact test |diff| <= delta for integer mantissa difference rows."""
    thr = Fraction(delta) * (1 << precision)
    thr_sq = thr * thr
    d2 = (diffs.astype(np.float64) ** 2).sum(axis=1)
    thr_f = float(thr_sq)
    result = d2 <= thr_f
    close = np.abs(d2 - thr_f) <= 1e-9 * max(thr_f, 1.0)
    if close.any():
        result[close] = _exact_within(diffs[close], thr_sq)
    return result


def proximal_intersection(E: PointSet, F: PointSet, delta: float) -> PointSet:
    """Points of E within distance ``delta`` of some point of F.

    Grid hashing: F is bucketed at the finest dyadic scale whose cell side is
    at least ``delta``; each E point only inspects the 3**n neighbouring cells.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if E.ambient_dim != F.ambient_dim or E.precision != F.precision:
        raise ValueError("sets must share ambient dimension and precision")
    if not len(E) or not len(F):
        return PointSet.empty(E.ambient_dim, E.precision, E.label)
    p, n = E.precision, E.ambient_dim
    k = math.floor(-math.log2(delta))
    while 2.0**-k < delta:  # guard against log2 rounding
        k -= 1
    k = min(k, p)
    shift = max(p - k, 0)
    if shift > 62:
        return E
    cE = E.mantissas >> shift
    cF = F.mantissas >> shift
    offsets = np.array(list(itertools.product((-1, 0, 1), repeat=n)), dtype=np.int64)
    neighbour_blocks = [cE + off for off in offsets]
    ids = _row_ids(cF, *neighbour_blocks)
    idF, idN = ids[0], ids[1:]
    order = np.argsort(idF, kind="stable")
    sortedF = idF[order]
    hit = np.zeros(len(E), dtype=bool)
    for nb in idN:
        lo = np.searchsorted(sortedF, nb, side="left")
        hi = np.searchsorted(sortedF, nb, side="right")
        lens = hi - lo
        todo = np.flatnonzero((lens > 0) & ~hit)
        if not len(todo):
            continue
        reps = lens[todo]
        e_idx = np.repeat(todo, reps)
        starts = np.repeat(lo[todo], reps)
        within = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        f_idx = order[starts + within]
        ok = within_distance(E.mantissas[e_idx] - F.mantissas[f_idx], delta, p)
        hit[e_idx[ok]] = True
    return E.subset(hit)


def brute_force_intersection(E: PointSet, F: PointSet, delta: float) -> PointSet:
    """O(|E||F|) reference for :func:`proximal_intersection` (exact arithmetic)."""
    thr = Fraction(delta) * (1 << E.precision)
    # |x - y|^2 <= (a/b)^2  <=>  b^2 |x - y|^2 <= a^2, all in integers
    a2, b2 = thr.numerator**2, thr.denominator**2
    keep = np.zeros(len(E), dtype=bool)
    Fm = [tuple(int(c) for c in row) for row in F.mantissas]
    for i, row in enumerate(E.mantissas):
        x = [int(c) for c in row]
        keep[i] = any(b2 * sum((u - v) ** 2 for u, v in zip(x, y)) <= a2 for y in Fm)
    return E.subset(keep)


def nearest_distances(E: PointSet, F: PointSet, upper: float = np.inf) -> np.ndarray:
    """Euclidean distance from each point of E to its nearest point of F.

    Distances above ``upper`` come back as ``inf``.  Floating point; use
    :func:`thickened_mask` for exact threshold decisions.
    """
    from scipy.spatial import cKDTree

    if not len(F):
        return np.full(len(E), np.inf)
    tree = cKDTree(F.values)
    dist, _ = tree.query(E.values, distance_upper_bound=upper)
    return dist


def thickened_mask(E: PointSet, F: PointSet, delta: float, dist: np.ndarray) -> np.ndarray:
    """Exact mask of E points within ``delta`` of F, given approximate distances.

    Rows whose float distance is too close to ``delta`` to decide are
    re-checked with :func:`proximal_intersection`.
    """
    mask = dist <= delta
    ambiguous = np.abs(dist - delta) <= 1e-9 * delta + 2.0 ** -(E.precision + 20)
    if ambiguous.any():
        idx = np.flatnonzero(ambiguous)
        sub = E.subset(idx)
        hit = proximal_intersection(sub, F, delta)
        if len(hit):
            ids_sub, ids_hit = _row_ids(sub.mantissas, hit.mantissas)
            mask[idx] = np.isin(ids_sub, ids_hit)
        else:
            mask[idx] = False
    return mask
