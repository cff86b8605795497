"""Campaigns that test the intersection, product, invariance and chain-rule
inequalities on generated sets, and report the outcome as structured data.

"Almost every translation" is checked statistically: translations (and
rotation angles) are drawn from the seeded PRNG, and a campaign passes when
the fraction of samples whose estimate exceeds bound + tolerance stays
within the allowed budget.

Intersections of finite samples are thickened at the resolution of each
scale: the count at scale r uses the points of E within 2**(-r + j) of the
moved copy of F, for offsets j in ``params.delta_offsets``.  The primary
estimate uses the first offset; the others are reported alongside it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .estimators import box_count, count_cells, fit_profile, scale_profile
from .geometry import (
    PointSet,
    RigidMotion,
    cartesian_product,
    diameter,
    nearest_distances,
    thickened_mask,
    _trusted,
)
from .rng import XorShift64Star

TAGS = (
    "T1-intersection",
    "C4.1-motion",
    "T4.3-packing",
    "T5.1-product",
    "L3.2-invariance",
    "T3.4-chain",
    "P2S-probe",
)
MIN_SAMPLES = 30


class InsufficientSamples(ValueError):
    pass


@dataclass(frozen=True)
class CampaignParams:
    r_min: int = 3
    r_max: int = 8
    tolerance: float = 0.1
    allowed_fraction: float = 0.05
    delta_offsets: tuple[int, ...] = (0, 1, 2)
    box_factor: float = 2.0
    exceptional_margin: float = 0.3
    agreement_limit: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.r_min < self.r_max:
            raise ValueError("need 0 <= r_min < r_max")
        if not self.delta_offsets:
            raise ValueError("need at least one thickening offset")
        object.__setattr__(self, "delta_offsets", tuple(int(j) for j in self.delta_offsets))

    @property
    def scales(self) -> range:
        return range(self.r_min, self.r_max + 1)

    @property
    def deltas(self) -> list[float]:
        return [2.0 ** (-self.r_max + j) for j in self.delta_offsets]


@dataclass
class ExperimentReport:
    name: str
    theorem_tag: str
    samples: int
    estimates: list[dict]
    bound: float
    violations: int
    tolerance: float
    passed: bool | None
    provenance: dict
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem_tag not in TAGS:
            raise ValueError(f"unknown theorem tag {self.theorem_tag!r}")

    @property
    def violation_fraction(self) -> float:
        return self.violations / self.samples if self.samples else 0.0

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "theorem_tag": self.theorem_tag,
            "samples": self.samples,
            "bound": self.bound,
            "tolerance": self.tolerance,
            "allowed_fraction": self.provenance.get("allowed_fraction"),
            "violations": self.violations,
            "violation_fraction": self.violation_fraction,
            "pass": self.passed,
            "checks": self.checks,
            "estimates": self.estimates,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), indent=1, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        """Per-sample sidecar: one row per estimate with its bound."""
        if not self.estimates:
            return "sample\n"
        cols = ["sample"] + [k for k in self.estimates[0] if k != "sample" and not isinstance(self.estimates[0][k], (list, dict))]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols + ["bound"])
        for row in self.estimates:
            w.writerow([_cell(row.get(c)) for c in cols] + [_cell(self.bound)])
        return buf.getvalue()

    def summary(self, command: str | None = None, value: float | None = None) -> str:
        status = "REPORT" if self.passed is None else ("PASS" if self.passed else "FAIL")
        if value is None:
            value = self.checks.get("summary_value", float("nan"))
        return (
            f"{command or self.name} {self.provenance.get('label', self.name)} value={_fmt(value)} "
            f"bound={_fmt(self.bound)} violations={self.violations}/{self.samples} status={status}"
        )


def _fmt(v) -> str:
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.4f}"


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


# --- samplers ---------------------------------------------------------------


def random_rotation(rng: XorShift64Star, n: int) -> np.ndarray:
    """Uniform rotation: an angle in the plane, a sign in R^1, Haar QR beyond."""
    if n == 1:
        return np.array([[1.0 if rng.below(2) else -1.0]])
    if n == 2:
        t = 2 * math.pi * rng.uniform()
        c, s = math.cos(t), math.sin(t)
        return np.array([[c, -s], [s, c]])
    a = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@dataclass(frozen=True)
class BoxSampler:
    """Uniform translations from the axis-aligned box center +/- side/2."""

    center: tuple[float, ...]
    side: float

    def __call__(self, rng: XorShift64Star) -> np.ndarray:
        c = np.asarray(self.center)
        return c + self.side * (np.array([rng.uniform() for _ in c]) - 0.5)

    def describe(self) -> dict:
        return {"kind": "uniform-box", "center": list(self.center), "side": self.side}


@dataclass(frozen=True)
class MotionSampler:
    """Uniform rotation (scaled by ``scale``) followed by a uniform box translation."""

    box: BoxSampler
    n: int
    scale: float = 1.0

    def __call__(self, rng: XorShift64Star) -> RigidMotion:
        rot = random_rotation(rng, self.n)
        z = self.box(rng)
        return RigidMotion(rot, z, self.scale)

    def describe(self) -> dict:
        return {"kind": "rotation+box", "box": self.box.describe(), "scale": self.scale}


def translation_box(E: PointSet, F: PointSet, factor: float = 2.0) -> BoxSampler:
    """Box of side factor * (diam E + diam F) centred where F's centre meets E's."""
    center = E.center() - F.center()
    return BoxSampler(tuple(float(v) for v in center), float(factor * (diameter(E) + diameter(F))))


def default_motion_sampler(E: PointSet, F: PointSet, factor: float = 2.0, scale: float = 1.0) -> MotionSampler:
    """Rotations about the origin, then translations around E's centre.

    The box is widened by the distance F's centre can travel under rotation.
    """
    drift = scale * float(np.linalg.norm(F.center()))
    side = factor * (diameter(E) + scale * diameter(F)) + 2 * drift
    return MotionSampler(BoxSampler(tuple(float(v) for v in E.center()), float(side)), E.ambient_dim, scale)


# --- thickened intersections ------------------------------------------------


def moved_mantissas(F: PointSet, motion: RigidMotion | None, z: np.ndarray | None) -> np.ndarray:
    """Mantissas of motion(F) + z with the rounding of apply_motion, unbounded."""
    p = F.precision
    m = F.mantissas
    if motion is not None:
        lin = motion.scale * (m.astype(np.float64) @ motion.rotation.T)
        moved = np.rint(lin + np.ldexp(motion.translation, p)).astype(np.int64)
    else:
        moved = m.copy()
    if z is not None:
        moved = moved + np.rint(np.ldexp(np.asarray(z, dtype=np.float64), p)).astype(np.int64)
    return moved


def _crop(E: PointSet, moved: np.ndarray, margin: float) -> PointSet:
    """Rows of ``moved`` inside E's bounding box grown by ``margin``, as a PointSet."""
    pad = int(math.ceil(margin * 2.0**E.precision)) + 1
    lo = E.mantissas.min(axis=0) - pad
    hi = E.mantissas.max(axis=0) + pad
    keep = np.all((moved >= lo) & (moved <= hi), axis=1)
    rows = moved[keep]
    if len(rows) > 1:
        rows = np.unique(rows, axis=0)
    return _trusted(rows, E.precision, "", E.ambient_dim)


@dataclass(frozen=True)
class IntersectionSample:
    empty: bool
    counts: tuple[tuple[int, ...], ...]  # one count profile per thickening offset
    fits: tuple[tuple[float, float, float], ...]  # (value, lower, upper) per offset


def intersection_sample(E: PointSet, F_moved: PointSet, params: CampaignParams) -> IntersectionSample:
    """Scale-matched thickened intersection profiles of E with a moved copy of F."""
    scales = list(params.scales)
    reach = 2.0 ** (-params.r_min + max(params.delta_offsets))
    dist = nearest_distances(E, F_moved, upper=reach * (1 + 1e-9))
    counts, fits = [], []
    for j in params.delta_offsets:
        prof = []
        for r in scales:
            mask = thickened_mask(E, F_moved, 2.0 ** (-r + j), dist)
            prof.append(count_cells(E.mantissas[mask], E.precision, r))
        counts.append(tuple(prof))
        if prof[-1] == 0:
            fits.append((0.0, 0.0, 0.0))
        elif len(set(prof)) == 1:
            fits.append((0.0, 0.0, 0.0))
        else:
            v, lo, hi, _ = fit_profile(scales, np.log2(np.maximum(prof, 1)))
            fits.append((v, lo, hi))
    return IntersectionSample(counts[0][-1] == 0, tuple(counts), tuple(fits))


def product_profile(E: PointSet, F: PointSet, scales: Sequence[int]) -> list[int]:
    """N_r(E x F) from the factor counts (the dyadic grid of E x F is the product grid)."""
    return [box_count(E, r) * box_count(F, r) for r in scales]


def product_bound(E: PointSet, F: PointSet, params: CampaignParams) -> tuple[float, float, float]:
    """(value, lower, upper) slope of the product profile over the campaign scales."""
    scales = list(params.scales)
    v, lo, hi, _ = fit_profile(scales, np.log2(product_profile(E, F, scales)))
    return v, lo, hi


# --- intersection-type campaigns ---------------------------------------------


def _provenance(params: CampaignParams, extra: dict) -> dict:
    prov = {"tool": "fractaldim", "version": __version__}
    prov.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(params).items()})
    prov["deltas"] = params.deltas
    prov.update(extra)
    return prov


def _run_intersections(
    name: str,
    tag: str,
    E: PointSet,
    F: PointSet,
    draws: list,
    to_motion: Callable,
    params: CampaignParams,
    use_upper: bool,
    sampler_desc: dict,
    similarity_scale: float,
) -> ExperimentReport:
    n = E.ambient_dim
    pv, plo, phi = product_bound(E, F, params)
    bound = max(0.0, (phi if use_upper else pv) - n)
    margin = max(params.deltas) * (1 + 1e-9)
    estimates, violations = [], 0
    for i, draw in enumerate(draws):
        motion, z = to_motion(draw)
        moved = moved_mantissas(F, motion, z)
        Fm = _crop(E, moved, margin)
        s = intersection_sample(E, Fm, params)
        vals = [(f[2] if use_upper else f[0]) for f in s.fits]
        est = vals[0]
        viol = (not s.empty) and est > bound + params.tolerance
        violations += viol
        rec = {"sample": i, "value": est, "lower": s.fits[0][1], "upper": s.fits[0][2], "empty": s.empty, "violation": viol}
        for j, v in zip(params.delta_offsets[1:], vals[1:]):
            rec[f"value_delta_offset_{j}"] = v
        rec["r_min"], rec["r_max"], rec["delta"] = params.r_min, params.r_max, params.deltas[0]
        rec.update(_draw_record(draw))
        rec["counts"] = [list(c) for c in s.counts]
        estimates.append(rec)

    # aligned sample: identity motion, zero translation
    aligned = intersection_sample(E, F, params) if E.ambient_dim == F.ambient_dim else None
    checks: dict = {
        "product_value": pv,
        "product_lower": plo,
        "product_upper": phi,
    }
    nonempty = [e["value"] for e in estimates if not e["empty"]]
    checks["nonempty_fraction"] = len(nonempty) / len(estimates)
    checks["median_nonempty_estimate"] = float(np.median(nonempty)) if nonempty else 0.0
    checks["summary_value"] = checks["median_nonempty_estimate"]
    for j_idx, j in enumerate(params.delta_offsets):
        if j_idx == 0:
            continue
        key = f"value_delta_offset_{j}"
        checks[f"violations_delta_offset_{j}"] = sum(
            (not e["empty"]) and e[key] > bound + params.tolerance for e in estimates
        )
    if aligned is not None:
        a_est = aligned.fits[0][2] if use_upper else aligned.fits[0][0]
        checks["aligned_estimate"] = a_est
        checks["aligned_excess"] = a_est - bound
        checks["aligned_exceptional"] = bool(a_est - bound >= params.exceptional_margin)
    passed = violations / len(draws) <= params.allowed_fraction
    prov = _provenance(
        params,
        {
            "label": f"{E.label}|{F.label}",
            "E": {"label": E.label, "points": len(E), "dim": E.ambient_dim},
            "F": {"label": F.label, "points": len(F), "dim": F.ambient_dim},
            "count": len(draws),
            "sampler": sampler_desc,
            "similarity_scale": similarity_scale,
            "estimate_side": "upper" if use_upper else "value",
        },
    )
    return ExperimentReport(name, tag, len(draws), estimates, bound, violations, params.tolerance, passed, prov, checks)


def _draw_record(draw) -> dict:
    if isinstance(draw, RigidMotion):
        rec = {"translation": [float(v) for v in draw.translation]}
        if draw.n == 2:
            rec["angle"] = math.atan2(draw.rotation[1, 0], draw.rotation[0, 0])
        rec["scale"] = draw.scale
        return rec
    return {"z": [float(v) for v in draw]}


def _check_count(count: int) -> None:
    if count < MIN_SAMPLES:
        raise InsufficientSamples(f"insufficient samples: {count} < {MIN_SAMPLES}")


def intersection_campaign(
    E: PointSet,
    F: PointSet,
    z_sampler: Callable | None = None,
    count: int = 100,
    params: CampaignParams | None = None,
) -> ExperimentReport:
    """Translation campaign: dim(E ∩ (F+z)) <= max(0, dim(E x F) - n) for sampled z."""
    params = params or CampaignParams()
    _check_count(count)
    if E.ambient_dim != F.ambient_dim:
        raise ValueError("E and F must share the ambient dimension")
    sampler = z_sampler or translation_box(E, F, params.box_factor)
    rng = XorShift64Star(params.seed)
    draws = [sampler(rng) for _ in range(count)]
    desc = sampler.describe() if hasattr(sampler, "describe") else {"kind": "custom"}
    return _run_intersections(
        "intersection", "T1-intersection", E, F, draws, lambda z: (None, z), params, False, desc, 1.0
    )


def packing_intersection_campaign(
    E: PointSet,
    F: PointSet,
    z_sampler: Callable | None = None,
    count: int = 100,
    params: CampaignParams | None = None,
) -> ExperimentReport:
    """Translation campaign on the upper (packing-side) slope.

    The upper slope stands in for packing dimension only when the lower and
    upper slopes of the inputs agree, so that is checked first; a
    disagreement fails the campaign.
    """
    params = params or CampaignParams()
    _check_count(count)
    agreement = {}
    for key, S in (("E", E), ("F", F)):
        prof = scale_profile(S, params.scales)
        _, lo, hi, _ = fit_profile(prof.scales, prof.log2_counts)
        agreement[key] = hi - lo
    sampler = z_sampler or translation_box(E, F, params.box_factor)
    rng = XorShift64Star(params.seed)
    draws = [sampler(rng) for _ in range(count)]
    desc = sampler.describe() if hasattr(sampler, "describe") else {"kind": "custom"}
    rep = _run_intersections(
        "packing_intersection", "T4.3-packing", E, F, draws, lambda z: (None, z), params, True, desc, 1.0
    )
    rep.checks["slope_agreement"] = agreement
    rep.checks["slope_agreement_ok"] = all(v < params.agreement_limit for v in agreement.values())
    if not rep.checks["slope_agreement_ok"]:
        rep.passed = False
    return rep


def motion_campaign(
    E: PointSet,
    F: PointSet,
    motion_sampler: Callable | None = None,
    count: int = 100,
    params: CampaignParams | None = None,
    scale: float = 1.0,
) -> ExperimentReport:
    """Rigid-motion (or similarity, scale != 1) campaign on dim(E ∩ σ(F))."""
    params = params or CampaignParams()
    _check_count(count)
    sampler = motion_sampler or default_motion_sampler(E, F, params.box_factor, scale)
    rng = XorShift64Star(params.seed)
    draws = [sampler(rng) for _ in range(count)]
    desc = sampler.describe() if hasattr(sampler, "describe") else {"kind": "custom"}
    return _run_intersections(
        "motion", "C4.1-motion", E, F, draws, lambda m: (m, None), params, False, desc, scale
    )


# --- product ------------------------------------------------------------------


def product_campaign(
    E: PointSet,
    F: PointSet,
    params: CampaignParams | None = None,
    cap: int = 10**8,
    oracle: float | None = None,
) -> ExperimentReport:
    """Finite product chain

        lower(E)+lower(F) <= lower(ExF) <= lower(E)+upper(F) <= upper(ExF) <= upper(E)+upper(F)

    with tolerance tau per link, plus the exact count identity
    N_r(E x F) = N_r(E) N_r(F) on every scale.
    """
    params = params or CampaignParams(r_min=3, r_max=11, allowed_fraction=0.0)
    scales = list(params.scales)
    P = cartesian_product(E, F, cap)
    est = {}
    for key, S in (("E", E), ("F", F), ("ExF", P)):
        prof = scale_profile(S, scales)
        if len(set(prof.counts)) == 1:
            est[key] = (0.0, 0.0, 0.0)
        else:
            v, lo, hi, _ = fit_profile(prof.scales, prof.log2_counts)
            est[key] = (v, lo, hi)
    identity = {r: (box_count(P, r), box_count(E, r) * box_count(F, r)) for r in scales}
    identity_ok = all(a == b for a, b in identity.values())
    rungs = [
        ("lower(E)+lower(F)", est["E"][1] + est["F"][1]),
        ("lower(ExF)", est["ExF"][1]),
        ("lower(E)+upper(F)", est["E"][1] + est["F"][2]),
        ("upper(ExF)", est["ExF"][2]),
        ("upper(E)+upper(F)", est["E"][2] + est["F"][2]),
    ]
    tau = params.tolerance
    estimates, violations = [], 0
    for k in range(4):
        (ln, lv), (rn, rv) = rungs[k], rungs[k + 1]
        viol = lv > rv + tau
        violations += viol
        estimates.append({"sample": k, "left": ln, "left_value": lv, "right": rn, "right_value": rv, "violation": viol})
    checks = {
        "rungs": {n: v for n, v in rungs},
        "E": dict(zip(("value", "lower", "upper"), est["E"])),
        "F": dict(zip(("value", "lower", "upper"), est["F"])),
        "ExF": dict(zip(("value", "lower", "upper"), est["ExF"])),
        "count_identity": {str(r): list(v) for r, v in identity.items()},
        "count_identity_ok": identity_ok,
        "summary_value": est["ExF"][0],
    }
    if oracle is not None:
        checks["oracle"] = oracle
        checks["max_rung_deviation"] = max(abs(v - oracle) for _, v in rungs)
    passed = identity_ok and violations / 4 <= params.allowed_fraction
    prov = _provenance(
        params,
        {
            "label": f"{E.label}x{F.label}",
            "E": {"label": E.label, "points": len(E), "dim": E.ambient_dim},
            "F": {"label": F.label, "points": len(F), "dim": F.ambient_dim},
            "cap": cap,
        },
    )
    return ExperimentReport("product", "T5.1-product", 4, estimates, est["E"][0] + est["F"][0], violations, tau, passed, prov, checks)


# --- invariance ---------------------------------------------------------------


def power_of_two_scale(S: PointSet, k: int) -> PointSet:
    """Exact dilation by 2**k (a left or right shift of every mantissa)."""
    if k >= 0:
        return PointSet(S.mantissas << k, S.precision, S.label, S.ambient_dim)
    if np.any(S.mantissas & ((1 << -k) - 1)):
        raise ValueError("contraction would lose bits; raise the precision first")
    return PointSet(S.mantissas >> -k, S.precision, S.label, S.ambient_dim)


def invariance_campaign(
    sets: Sequence[PointSet],
    motions: Sequence,
    params: CampaignParams | None = None,
    points: Sequence = (),
    r_list: Sequence[int] = (),
    limit: float = 0.05,
    point_limit: float = 0.1,
) -> ExperimentReport:
    """Box-dimension change under isometries and power-of-two dilations.

    ``motions`` holds RigidMotion objects or integers k (dilation by 2**k).
    Dilations must reproduce the count profile exactly, shifted by k scales.
    Optional ``points`` are checked for effective-dimension shifts under
    the dilation x -> x / 2 (one extra leading zero per coordinate).
    """
    from .algodim import dim_estimate
    from .geometry import Point, apply_motion

    params = params or CampaignParams(r_min=3, r_max=8)
    scales = list(params.scales)
    estimates, violations = [], 0
    idx = 0
    for S in sets:
        base_prof = scale_profile(S, scales)
        base = fit_profile(scales, base_prof.log2_counts)[0]
        for m in motions:
            rec = {"sample": idx, "set": S.label}
            if isinstance(m, (int, np.integer)):
                k = int(m)
                T = power_of_two_scale(S, k)
                # cells of side 2**-r around S become cells of side 2**(k-r) around T
                shifted = [r - k for r in scales]
                if shifted[0] < 0 or shifted[-1] > S.precision:
                    raise ValueError(f"scaling by 2^{k} moves the scales outside 0..precision")
                prof = [box_count(T, r) for r in shifted]
                exact = prof == list(base_prof.counts)
                rec.update({"motion": f"scale 2^{k}", "exact_counts": exact, "delta": 0.0 if exact else float("inf")})
                viol = not exact
            else:
                T = apply_motion(S, m)
                value = fit_profile(scales, np.log2([box_count(T, r) for r in scales]))[0]
                change = abs(value - base)
                rec.update({"motion": _draw_record(m), "value": value, "base": base, "delta": change})
                viol = change > limit
            rec["violation"] = viol
            violations += viol
            estimates.append(rec)
            idx += 1
    for x in points:
        rs = list(r_list)
        # same mantissas one bit deeper: the value x / 2, encodings gain a leading 0
        half = Point(x.coords, x.precision + 1)
        a = dim_estimate(x, rs)
        b = dim_estimate(half, rs)
        change = max(abs(a.lower - b.lower), abs(a.upper - b.upper))
        viol = change > point_limit
        violations += viol
        estimates.append({"sample": idx, "set": "point", "motion": "scale 2^-1", "delta": change, "violation": viol})
        idx += 1
    prov = _provenance(params, {"label": ",".join(S.label for S in sets), "limit": limit, "point_limit": point_limit, "r_list": list(r_list)})
    worst = max((e["delta"] for e in estimates), default=0.0)
    checks = {"max_change": worst, "summary_value": worst}
    return ExperimentReport(
        "invariance", "L3.2-invariance", len(estimates), estimates, limit, violations, limit, violations == 0, prov, checks
    )


# --- chain rule and point-to-set probe -----------------------------------------


def prng_pairs(seed: int, count: int, r: int) -> list:
    """``count`` pairs of independent PRNG points in [0, 1) with r bits each."""
    from .algodim import prng_point

    rng = XorShift64Star(seed)
    return [(prng_point(rng.next_u64(), 1, r), prng_point(rng.next_u64(), 1, r)) for _ in range(count)]


def chain_campaign(point_pairs: Sequence, r: int, calibration=None, allowed_fraction: float = 0.1) -> ExperimentReport:
    """Fraction of point pairs whose four chain-rule residuals all pass."""
    from .algodim import chain_rule_residuals, load_calibration

    if len(point_pairs) < 20:
        raise InsufficientSamples(f"insufficient samples: {len(point_pairs)} < 20 pairs")
    calibration = calibration or load_calibration()
    estimates, violations = [], 0
    for i, (x, y) in enumerate(point_pairs):
        res = chain_rule_residuals(x, y, r, calibration)
        viol = not res.ok
        violations += viol
        estimates.append(
            {
                "sample": i,
                "dim_x": res.dim_x.lower,
                "Dim_x": res.dim_x.upper,
                "dim_y_given_x": res.dim_y_given_x.lower,
                "Dim_y_given_x": res.dim_y_given_x.upper,
                "dim_xy": res.dim_xy.lower,
                "Dim_xy": res.dim_xy.upper,
                "residual_1": res.residuals[0],
                "residual_2": res.residuals[1],
                "residual_3": res.residuals[2],
                "residual_4": res.residuals[3],
                "slack": res.slack,
                "violation": viol,
            }
        )
    frac = violations / len(point_pairs)
    prov = {
        "tool": "fractaldim",
        "version": __version__,
        "label": f"{len(point_pairs)}pairs",
        "r": r,
        "r_list": list(res.r_list),
        "allowed_fraction": allowed_fraction,
        "calibration": {"c0": calibration.c0, "c1": calibration.c1, "encoder": calibration.encoder},
    }
    checks = {"pass_fraction": 1 - frac, "summary_value": 1 - frac}
    return ExperimentReport(
        "chain", "T3.4-chain", len(point_pairs), estimates, -res.slack, violations, res.slack, frac <= allowed_fraction, prov, checks
    )


def unit_cube_point(S: PointSet, i: int, shift_bits: int = 2):
    """Point i of S mapped into [0,1)^n by x -> (x + 2) / 4 (exact on mantissas)."""
    from .geometry import Point

    off = 1 << (S.precision + 1)
    coords = tuple(int(c) + off for c in S.mantissas[i])
    return Point(coords, S.precision + shift_bits)


def p2s_probe(
    S: PointSet,
    sample_count: int = 50,
    r_list: Sequence[int] | None = None,
    seed: int = 0,
    r_min: int | None = None,
    r_max: int | None = None,
) -> ExperimentReport:
    """Largest sampled point density next to the box dimension of the set.

    Points of a stored set carry only ``precision`` bits, so the densities
    are taken net of the fixed code-word header, (klen - header) / r, which
    would otherwise dominate at such short precisions.  Report only: no
    pass/fail is assigned.
    """
    from .algodim import HEADER_OVERHEAD, encode, klen
    from .algodim.estimates import tail
    from .estimators import box_dimension

    if sample_count < 50:
        raise InsufficientSamples(f"insufficient samples: {sample_count} < 50 points")
    rng = XorShift64Star(seed)
    P = S.precision + 2
    rs = list(r_list) if r_list else [P // 4, 3 * P // 8, P // 2, 5 * P // 8, 3 * P // 4, 7 * P // 8, P]
    picks = [rng.below(len(S)) for _ in range(sample_count)]
    estimates = []
    for k, i in enumerate(picks):
        x = unit_cube_point(S, i)
        dens = tail([max(0, klen(encode(x, r).bits) - HEADER_OVERHEAD) / r for r in rs])
        estimates.append({"sample": k, "index": i, "lower": min(dens), "upper": max(dens)})
    bd = box_dimension(S, r_min, r_max)
    sup_lower = max(e["lower"] for e in estimates)
    sup_upper = max(e["upper"] for e in estimates)
    checks = {
        "box_dimension": bd.value,
        "box_r_range": [bd.r_min, bd.r_max],
        "max_point_lower": sup_lower,
        "max_point_upper": sup_upper,
        "gap_lower": bd.value - sup_lower,
        "gap_upper": bd.value - sup_upper,
        "summary_value": sup_upper,
    }
    prov = {
        "tool": "fractaldim",
        "version": __version__,
        "label": S.label,
        "seed": seed,
        "sample_count": sample_count,
        "r_list": rs,
        "density": "net of header",
    }
    return ExperimentReport("p2s_probe", "P2S-probe", sample_count, estimates, bd.value, 0, 0.0, None, prov, checks)
