"""Classical dimension estimates.

Box counting on the dyadic grid with a least-squares fit of log2 N_r against
r, plus direct evaluators of cover sums (Hausdorff side) and packing sums
built from greedy constructions, and a critical-exponent search over them.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import PointSet, diameter

log = logging.getLogger(__name__)

AUTO_SLOPE_SPREAD = 0.2
EXPONENT_TOL = 1e-3


@dataclass(frozen=True)
class ScaleProfile:
    scales: tuple[int, ...]
    counts: tuple[int, ...]
    label: str = ""
    n_points: int = 0
    ambient_dim: int = 1

    def __post_init__(self):
        scales = tuple(int(r) for r in self.scales)
        counts = tuple(int(c) for c in self.counts)
        if len(scales) != len(counts):
            raise ValueError("scales and counts differ in length")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("counts must be nondecreasing in r")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if self.n_points:
            for r, c in zip(scales, counts):
                # the workspace [-2, 2]^n holds 2**((r+2) n) cells of side 2**-r
                if c > min(self.n_points, 2 ** ((r + 2) * self.ambient_dim)):
                    raise ValueError(f"count {c} at r={r} exceeds the cell bound")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "counts", counts)

    @property
    def log2_counts(self) -> np.ndarray:
        return np.log2(np.maximum(np.asarray(self.counts, dtype=np.float64), 1.0))

    def restrict(self, r_min: int, r_max: int) -> "ScaleProfile":
        keep = [(r, c) for r, c in zip(self.scales, self.counts) if r_min <= r <= r_max]
        return ScaleProfile(
            tuple(r for r, _ in keep), tuple(c for _, c in keep), self.label, self.n_points, self.ambient_dim
        )

    def to_csv(self) -> str:
        rows = ["r,N_r,log2_N"]
        for r, c, y in zip(self.scales, self.counts, self.log2_counts):
            rows.append(f"{r},{c},{float(y)!r}")
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "ScaleProfile":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0].replace(" ", "") != "r,N_r,log2_N":
            raise ValueError("ScaleProfile CSV must start with r,N_r,log2_N")
        rs, cs = [], []
        for ln in lines[1:]:
            r, c, _ = ln.split(",")
            rs.append(int(r))
            cs.append(int(c))
        return cls(tuple(rs), tuple(cs), label)


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    lower_slope: float
    upper_slope: float
    r_min: int
    r_max: int
    residual: float
    flags: tuple[str, ...] = field(default=())

    @property
    def r_range(self) -> tuple[int, int]:
        return (self.r_min, self.r_max)

    def to_record(self) -> dict:
        return {
            "value": self.value,
            "lower_slope": self.lower_slope,
            "upper_slope": self.upper_slope,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def from_json(cls, text: str) -> "DimensionEstimate":
        d = json.loads(text)
        return cls(d["value"], d["lower_slope"], d["upper_slope"], d["r_min"], d["r_max"], d["residual"])


def _cells(mantissas: np.ndarray, precision: int, r: int) -> np.ndarray:
    return mantissas >> (precision - r)


def _pack_keys(cells: np.ndarray, r: int) -> np.ndarray | None:
    """Pack multi-indices into one int64 per row when they fit in 63 bits."""
    n = cells.shape[1]
    width = r + 3  # cell indices lie in [-2**(r+1), 2**(r+1)] inside the workspace
    if width * n > 63:
        return None
    key = np.zeros(len(cells), dtype=np.int64)
    bias = np.int64(1) << np.int64(width - 1)
    for j in range(n):
        key = (key << np.int64(width)) | (cells[:, j] + bias)
    return key


def count_cells(mantissas: np.ndarray, precision: int, r: int) -> int:
    if not len(mantissas):
        return 0
    cells = _cells(mantissas, precision, r)
    if cells.shape[1] == 1:
        # sorted input stays sorted after the shift
        c = cells[:, 0]
        return int(1 + np.count_nonzero(c[1:] != c[:-1])) if _is_sorted(c) else len(np.unique(c))
    keys = _pack_keys(cells, r)
    if keys is None:
        return len(np.unique(cells, axis=0))
    return len(np.unique(keys))


def _is_sorted(a: np.ndarray) -> bool:
    return bool(np.all(a[1:] >= a[:-1]))


def box_count(points: PointSet, r: int) -> int:
    """Number of occupied half-open dyadic cells of side 2**-r."""
    if not len(points):
        raise ValueError("box count of empty set")
    if not 0 <= r <= points.precision:
        raise ValueError("scale beyond stored precision")
    return count_cells(points.mantissas, points.precision, r)


def scale_profile(points: PointSet, scales: Sequence[int]) -> ScaleProfile:
    counts = tuple(box_count(points, r) for r in scales)
    return ScaleProfile(tuple(scales), counts, points.label, len(points), points.ambient_dim)


def _slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and RMS residual."""
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    fit = y.mean() + slope * xc
    return slope, float(np.sqrt(np.mean((y - fit) ** 2)))


def fit_profile(scales: Sequence[int], log2_counts: Sequence[float]) -> tuple[float, float, float, float]:
    """Slope, band low, band high and RMS residual of a log-count profile.

    The band is the spread of the least-squares slope when either end scale
    is dropped; it widens where the profile bends (pre-asymptotic or
    saturated scales) and stays tight on a straight log-log line.
    """
    x = np.asarray(scales, dtype=np.float64)
    y = np.asarray(log2_counts, dtype=np.float64)
    value, resid = _slope(x, y)
    slopes = [value]
    if len(x) >= 3:
        slopes.append(_slope(x[1:], y[1:])[0])
        slopes.append(_slope(x[:-1], y[:-1])[0])
    return value, min(slopes), max(slopes), resid


def estimate_from_profile(profile: ScaleProfile) -> DimensionEstimate:
    r_min, r_max = profile.scales[0], profile.scales[-1]
    if len(set(profile.counts)) == 1:
        return DimensionEstimate(0.0, 0.0, 0.0, r_min, r_max, 0.0, ("degenerate",))
    value, lo, hi, resid = fit_profile(profile.scales, profile.log2_counts)
    return DimensionEstimate(value, lo, hi, r_min, r_max, resid)


def auto_range(points: PointSet, spread: float = AUTO_SLOPE_SPREAD) -> tuple[int, int]:
    """Longest run of scales whose consecutive slopes stay within ``spread``.

    Scales at or beyond saturation (every point in its own cell) are excluded,
    as are scales before the first split.
    """
    total = len(points)
    counts = []
    for r in range(points.precision + 1):
        counts.append(box_count(points, r))
        if counts[-1] == total:
            break
    first = next((r for r, c in enumerate(counts) if c > 1), None)
    if first is None or len(counts) - first < 2:
        return 0, min(1, points.precision)
    start = max(first - 1, 0)
    y = np.log2(np.asarray(counts, dtype=np.float64))
    d = np.diff(y)
    best = (start, start + 1)
    for a in range(start, len(d)):
        lo = hi = d[a]
        b = a
        while b + 1 < len(d) and max(hi, d[b + 1]) - min(lo, d[b + 1]) < spread:
            b += 1
            lo, hi = min(lo, d[b]), max(hi, d[b])
        # slope indices a..b cover scales a..b+1; prefer longer, then finer runs
        if (b + 1 - a) >= (best[1] - best[0]):
            best = (a, b + 1)
    log.info("auto-selected regression range r in [%d, %d] for %r", best[0], best[1], points.label)
    return best


def box_dimension(points: PointSet, r_min: int | None = None, r_max: int | None = None) -> DimensionEstimate:
    """Least-squares box-counting dimension over [r_min, r_max]."""
    if not len(points):
        raise ValueError("box dimension of empty set")
    if r_min is None or r_max is None:
        if len(points) < 2:
            r = min(1, points.precision)
            return DimensionEstimate(0.0, 0.0, 0.0, 0, r, 0.0, ("degenerate",))
        auto = auto_range(points)
        r_min = auto[0] if r_min is None else r_min
        r_max = auto[1] if r_max is None else r_max
    if not 0 <= r_min < r_max <= points.precision:
        raise ValueError("need 0 <= r_min < r_max <= precision")
    return estimate_from_profile(scale_profile(points, range(r_min, r_max + 1)))


def effective_diameter(diam: float, precision: int) -> float:
    """Give singletons the smallest positive diameter of the grid."""
    return diam if diam > 0 else 2.0**-precision


def hausdorff_sum(cover: Sequence, s: float, precision: int | None = None) -> float:
    """Sum of diam(U)**s over the cover.

    Elements may be PointSets or plain diameters.  A zero diameter counts
    as 2**-precision (taken from the PointSet when not given).
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    total = 0.0
    for u in cover:
        if isinstance(u, PointSet):
            if not len(u):
                raise ValueError("cover elements must be nonempty")
            d = effective_diameter(diameter(u), u.precision if precision is None else precision)
        else:
            d = float(u)
            if d <= 0:
                if precision is None:
                    raise ValueError("zero diameter needs a precision")
                d = 2.0**-precision
        total += d**s
    return total


def _cover_scale(delta: float, n: int) -> int:
    """Smallest k with 2**-k <= delta / sqrt(n)."""
    k = math.ceil(math.log2(math.sqrt(n) / delta))
    while 2.0**-k * math.sqrt(n) > delta:
        k += 1
    return k


def cover_cells(points: PointSet, delta: float) -> np.ndarray:
    """Cell label per point for the greedy cover (cells of side <= delta/sqrt(n))."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    k = min(_cover_scale(delta, points.ambient_dim), points.precision)
    shift = min(points.precision - k, 62)
    _, labels = np.unique(points.mantissas >> shift, axis=0, return_inverse=True)
    return labels.reshape(-1)


def greedy_cover(points: PointSet, delta: float) -> list[PointSet]:
    """Partition the points into dyadic cells whose diameter is at most delta."""
    if not len(points):
        return []
    labels = cover_cells(points, delta)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    return [points.subset(np.sort(idx)) for idx in np.split(order, bounds)]


def cover_diameters(points: PointSet, delta: float) -> np.ndarray:
    return np.array([effective_diameter(diameter(u), points.precision) for u in greedy_cover(points, delta)])


@dataclass(frozen=True)
class Packing:
    centers: np.ndarray  # indices into the point set, in selection order
    radii: np.ndarray

    def diameters(self) -> np.ndarray:
        return 2 * self.radii

    def sum(self, s: float) -> float:
        return float(np.sum(self.diameters() ** s))


def greedy_packing(points: PointSet, delta: float) -> Packing:
    """Disjoint balls centred on the points, radii delta/2, delta/4, ...

    At each radius the points are scanned in lexicographic order and a ball
    is kept when it is disjoint from every ball kept so far.  The smallest
    radius is 2**-(p+1), at which every remaining point gets a ball.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    x = points.values
    floor_rho = 2.0 ** -(points.precision + 1)
    # clearance[i] = min_j |x_i - c_j| - rho_j over balls chosen so far
    clearance = np.full(len(x), np.inf)
    centers: list[int] = []
    radii: list[float] = []
    rho = delta / 2
    while True:
        rho_eff = max(rho, floor_rho)
        for i in np.flatnonzero(clearance > rho_eff):
            if clearance[i] > rho_eff:
                centers.append(int(i))
                radii.append(rho_eff)
                dist = np.sqrt(((x - x[i]) ** 2).sum(axis=1))
                np.minimum(clearance, dist - rho_eff, out=clearance)
        if rho <= floor_rho:
            break
        rho /= 2
    return Packing(np.array(centers, dtype=np.int64), np.array(radii))


def packing_sum(points: PointSet, delta: float, s: float) -> float:
    if s < 0:
        raise ValueError("s must be nonnegative")
    return greedy_packing(points, delta).sum(s)


class CoverSums:
    """Cover sums sum(diam**s) for one point set, cached per delta."""

    kind = "cover"

    def __init__(self, points: PointSet):
        self.points = points
        self._cache: dict[float, np.ndarray] = {}

    def diameters(self, delta: float) -> np.ndarray:
        if delta not in self._cache:
            self._cache[delta] = self._build(delta)
        return self._cache[delta]

    def _build(self, delta: float) -> np.ndarray:
        return cover_diameters(self.points, delta)

    def __call__(self, delta: float, s: float) -> float:
        return float(np.sum(self.diameters(delta) ** s))


class PackingSums(CoverSums):
    kind = "packing"

    def _build(self, delta: float) -> np.ndarray:
        return greedy_packing(self.points, delta).diameters()


@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    fallback: bool
    reason: str = ""


def critical_exponent(
    points: PointSet,
    sums: Callable[[float, float], float] | None = None,
    deltas: Sequence[float] = (),
    tol: float = EXPONENT_TOL,
) -> ExponentEstimate:
    """Exponent where the sum at the smallest delta crosses 1, by bisection on [0, n].

    If the sum fails to decrease in s, or never crosses 1 inside [0, n], the
    result is flagged and the box-counting slope over the matching scales is
    returned instead.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 2 or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta sequence must be strictly decreasing with at least 2 values")
    if sums is None:
        sums = CoverSums(points)
    n = points.ambient_dim
    if len(points) == 1:
        return ExponentEstimate(0.0, False)
    d = deltas[-1]
    grid = np.linspace(0.0, n, 41)
    vals = np.array([sums(d, s) for s in grid])
    reason = ""
    if np.any(np.diff(vals) > 1e-12 * np.maximum(vals[:-1], 1.0)):
        reason = "sum not decreasing in s"
    elif vals[-1] > 1.0:
        reason = "no crossing inside [0, n]"
    if reason:
        r_lo = max(0, math.ceil(-math.log2(deltas[0])))
        r_hi = min(points.precision, math.floor(-math.log2(deltas[-1])))
        est = box_dimension(points, r_lo, r_hi) if r_lo < r_hi else box_dimension(points)
        log.warning("critical exponent fallback (%s); box slope %.4f", reason, est.value)
        return ExponentEstimate(est.value, True, reason)
    if vals[0] <= 1.0:
        return ExponentEstimate(0.0, False)
    lo, hi = 0.0, float(n)
    while hi - lo > tol / 2:
        mid = (lo + hi) / 2
        if sums(d, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return ExponentEstimate((lo + hi) / 2, False)


def profile_record(profile: ScaleProfile) -> dict:
    return asdict(profile)
