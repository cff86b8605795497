"""Finite-precision density estimates of effective dimensions.

Every estimate is a min/max of complexity densities klen/r over the tail
(upper half) of a list of precisions.  They are lower/upper density
estimates, not the limits themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from ..geometry import Point
from ..rng import XorShift64Star
from .compress import cond_klen, cond_klen_primed, klen, mutual_info
from .encoding import encode, joint_point

MIN_PRECISIONS = 4


class DensityEstimate(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class ComplexityProfile:
    precisions: tuple[int, ...]
    klens: tuple[int, ...]
    ambient_dim: int = 1

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(k / r for k, r in zip(self.klens, self.precisions))

    def to_csv(self) -> str:
        rows = ["r,klen,ratio"]
        rows += [f"{r},{k},{q!r}" for r, k, q in zip(self.precisions, self.klens, self.ratios)]
        return "\n".join(rows) + "\n"


def _check_r_list(r_list: Sequence[int], precision: int | None = None) -> list[int]:
    rs = [int(r) for r in r_list]
    if len(rs) < MIN_PRECISIONS:
        raise ValueError(f"need at least {MIN_PRECISIONS} precisions")
    if any(b <= a for a, b in zip(rs, rs[1:])) or rs[0] < 1:
        raise ValueError("precisions must be positive and increasing")
    if precision is not None and rs[-1] > precision:
        raise ValueError("scale beyond stored precision")
    return rs


def tail(values: Sequence[float]) -> list[float]:
    """Upper half of a sequence (the liminf/limsup window)."""
    return list(values)[len(values) // 2 :]


def _density(values: Sequence[float], rs: Sequence[int]) -> DensityEstimate:
    ratios = tail([v / r for v, r in zip(values, rs)])
    return DensityEstimate(min(ratios), max(ratios))


def complexity_profile(x: Point, r_list: Sequence[int], scheme: str = "interleaved") -> ComplexityProfile:
    rs = [int(r) for r in r_list]
    return ComplexityProfile(tuple(rs), tuple(klen(encode(x, r, scheme).bits) for r in rs), x.n)


def dim_estimate(x: Point, r_list: Sequence[int]) -> DensityEstimate:
    """Lower/upper density estimate of the effective dimension of x."""
    rs = _check_r_list(r_list, x.precision)
    return _density([klen(encode(x, r).bits) for r in rs], rs)


def mdim_estimate(x: Point, y: Point, r_list: Sequence[int]) -> DensityEstimate:
    """Lower/upper density estimate of the mutual dimension of x and y."""
    rs = _check_r_list(r_list, min(x.precision, y.precision))
    return _density([mutual_info(encode(x, r).bits, encode(y, r).bits) for r in rs], rs)


def cdim_estimate(x: Point, y: Point, r_list: Sequence[int], method: str = "difference") -> DensityEstimate:
    """Lower/upper density estimate of the dimension of x given y.

    ``difference`` uses klen(y, x) - klen(y); ``primed`` codes x with the
    window pre-loaded with y.
    """
    rs = _check_r_list(r_list, min(x.precision, y.precision))
    cond = {"difference": cond_klen, "primed": cond_klen_primed}[method]
    return _density([cond(encode(x, r).bits, encode(y, r).bits) for r in rs], rs)


def chain_r_list(r: int) -> list[int]:
    """Precisions r/2, 5r/8, 3r/4, 7r/8, r used by the chain-rule check."""
    if r < 16:
        raise ValueError("chain-rule precision must be at least 16")
    return [r // 2, 5 * r // 8, 3 * r // 4, 7 * r // 8, r]


@dataclass(frozen=True)
class ChainResult:
    r: int
    r_list: tuple[int, ...]
    dim_x: DensityEstimate
    dim_y_given_x: DensityEstimate
    dim_xy: DensityEstimate
    residuals: tuple[float, float, float, float]
    sigma: float

    @property
    def slack(self) -> float:
        return self.sigma / self.r

    @property
    def passes(self) -> tuple[bool, ...]:
        return tuple(res >= -self.slack for res in self.residuals)

    @property
    def ok(self) -> bool:
        return all(self.passes)


def sigma(r: int, c0: float, c1: float) -> float:
    """Slack budget in bits at precision r."""
    return c0 + c1 * float(np.sqrt(r))


def chain_rule_residuals(x: Point, y: Point, r: int, calibration=None) -> ChainResult:
    """Residuals of the four chain-rule inequalities at precisions up to r.

    With lower (dim) and upper (Dim) density estimates, the chain is

        dim(x) + dim(y|x) <= dim(x,y) <= dim(x) + Dim(y|x) <= Dim(x,y) <= Dim(x) + Dim(y|x)

    and each residual is right side minus left side of one link, so a
    residual >= -sigma(r)/r counts as a pass.
    """
    if calibration is None:
        from .calibration import load_calibration

        calibration = load_calibration()
    rs = chain_r_list(r)
    rs = _check_r_list(rs, min(x.precision, y.precision))
    dx = dim_estimate(x, rs)
    dyx = cdim_estimate(y, x, rs)
    dxy = dim_estimate(joint_point(x, y), rs)
    residuals = (
        dxy.lower - (dx.lower + dyx.lower),
        (dx.lower + dyx.upper) - dxy.lower,
        dxy.upper - (dx.lower + dyx.upper),
        (dx.upper + dyx.upper) - dxy.upper,
    )
    return ChainResult(r, tuple(rs), dx, dyx, dxy, residuals, sigma(r, calibration.c0, calibration.c1))


# --- canonical test points --------------------------------------------------


def prng_point(seed: int, n: int = 1, precision: int = 4096) -> Point:
    """Point whose coordinates are independent PRNG bit strings in [0, 1)."""
    rng = XorShift64Star(seed)
    return Point(tuple(rng.random_bits(precision) for _ in range(n)), precision)


def dyadic_point(values: Sequence, precision: int = 4096) -> Point:
    """Point with eventually-zero binary expansions (exact dyadic rationals)."""
    fr = [Fraction(v) for v in values]
    for f in fr:
        if f.denominator & (f.denominator - 1) or not 0 <= f < 1:
            raise ValueError("coordinates must be dyadic rationals in [0, 1)")
    return Point.from_values(fr, precision)


def periodic_point(pattern: str, n: int = 1, precision: int = 4096) -> Point:
    """Point whose binary expansion repeats ``pattern`` in every coordinate."""
    reps = -(-precision // len(pattern))
    bits = (pattern * reps)[:precision]
    return Point((int(bits, 2),) * n, precision)
