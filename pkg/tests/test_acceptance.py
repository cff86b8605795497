"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in conftest.ACCEPTANCE_LINES and shown in the
terminal summary as well as on stdout (visible with ``-s``).
"""

import math
import time

import numpy as np
import pytest

import conftest
from fractaldim.algodim import dim_estimate, dyadic_point, load_calibration, mdim_estimate, prng_point
from fractaldim.estimators import box_count, box_dimension, greedy_cover, hausdorff_sum
from fractaldim.experiments import (
    CampaignParams,
    chain_campaign,
    intersection_campaign,
    invariance_campaign,
    motion_campaign,
    p2s_probe,
    packing_intersection_campaign,
    prng_pairs,
    product_campaign,
)
from fractaldim.generators import cantor_ifs, cantor_set, koch_curve_ifs, koch_snowflake, moran_dimension
from fractaldim.geometry import PointSet, RigidMotion, brute_force_intersection, proximal_intersection, translate
from fractaldim.rng import XorShift64Star

from oracles import optimal_cover_sum

KOCH_DIM = moran_dimension(koch_curve_ifs())  # log 4 / log 3
CANTOR_DIM = moran_dimension(cantor_ifs())  # log 2 / log 3
KOCH_BOUND = 2 * KOCH_DIM - 2


def record(criterion: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {criterion} {title}: {'PASS' if ok else 'FAIL'} ({detail})"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def koch6():
    return koch_snowflake(6)


def test_criterion_1_koch_dimension():
    t0 = time.perf_counter()
    est = box_dimension(koch_snowflake(6), 3, 8)
    elapsed = time.perf_counter() - t0
    ok = abs(est.value - 1.26) <= 0.05 and elapsed < 10
    record(1, "Koch dimension", ok, f"value={est.value:.4f} target 1.26+-0.05, {elapsed:.2f}s < 10s")
    assert ok


def test_criterion_2_intersection_bound(koch6):
    t0 = time.perf_counter()
    rep = intersection_campaign(koch6, koch6, count=100, params=CampaignParams(seed=0))
    elapsed = time.perf_counter() - t0
    excess = rep.checks["aligned_excess"]
    ok = rep.violation_fraction <= 0.05 and excess >= 0.3 and elapsed < 300
    record(
        2,
        "intersection bound",
        ok,
        f"bound={rep.bound:.4f} violations={rep.violations}/{rep.samples} (<= 5%), "
        f"aligned excess={excess:.3f} (>= 0.3), {elapsed:.1f}s",
    )
    assert abs(rep.bound - KOCH_BOUND) <= 0.1
    assert excess >= 0.3
    assert rep.violations <= 5, rep.summary()
    assert elapsed < 300


def test_criterion_3_rigid_motions(koch6):
    rep = motion_campaign(koch6, koch6, count=100, params=CampaignParams(seed=0))
    ok = rep.violation_fraction <= 0.05
    record(3, "rigid motions", ok, f"bound={rep.bound:.4f} violations={rep.violations}/{rep.samples} (<= 5%)")
    assert rep.violations <= 5, rep.summary()


def test_criterion_4_product_chain():
    C = cantor_set(1 / 3, 8)
    oracle = 2 * CANTOR_DIM
    rep = product_campaign(C, C, oracle=oracle)
    rungs = rep.checks["rungs"]
    dev = rep.checks["max_rung_deviation"]
    identity = rep.checks["count_identity_ok"]
    ok = dev <= 0.1 and identity
    record(
        4,
        "product chain",
        ok,
        "rungs=" + ",".join(f"{v:.4f}" for v in rungs.values()) + f" max |rung-{oracle:.4f}|={dev:.4f}, count identity {identity}",
    )
    assert identity
    assert all(abs(v - oracle) <= 0.1 for v in rungs.values())


def test_criterion_5_packing_intersection(koch6):
    rep = packing_intersection_campaign(koch6, koch6, count=100, params=CampaignParams(seed=0))
    agree = rep.checks["slope_agreement"]
    ok = rep.checks["slope_agreement_ok"] and rep.violation_fraction <= 0.05
    record(
        5,
        "packing-side intersection",
        ok,
        f"slope agreement E={agree['E']:.4f} F={agree['F']:.4f} (< 0.1), "
        f"violations={rep.violations}/{rep.samples} (<= 5%)",
    )
    assert rep.checks["slope_agreement_ok"]
    assert rep.violations <= 5, rep.summary()


def test_criterion_6_bilipschitz_invariance(koch6):
    rng = XorShift64Star(6)
    rotations = [RigidMotion.planar(math.pi / 6)]
    rotations += [RigidMotion.planar(2 * math.pi * rng.uniform()) for _ in range(9)]
    rep = invariance_campaign([koch6], [1, 2] + rotations, CampaignParams(r_min=3, r_max=8))
    exact = all(e["exact_counts"] for e in rep.estimates if "exact_counts" in e)
    lattice = translate(koch6, [0.5, -0.25])
    lattice_ok = all(box_count(lattice, r) == box_count(koch6, r) for r in range(2, 20))
    worst = max(e["delta"] for e in rep.estimates if "exact_counts" not in e)
    ok = exact and lattice_ok and worst <= 0.05
    record(6, "bi-Lipschitz invariance", ok, f"2^k counts identical {exact}, lattice shift identical {lattice_ok}, max rotation change={worst:.4f} (<= 0.05)")
    assert exact and lattice_ok
    assert worst <= 0.05


def test_criterion_7_effective_dimension_proxies():
    rs = [2048, 2560, 3072, 3584, 4096]
    dyadic = dim_estimate(dyadic_point(["3/8"]), rs)
    prng = dim_estimate(prng_point(1), rs)
    x = prng_point(2)
    dx, mxx = dim_estimate(x, rs), mdim_estimate(x, x, rs)
    obs = max(abs(dx.lower - mxx.lower), abs(dx.upper - mxx.upper))
    chain = chain_campaign(prng_pairs(0, 50, 4096), 4096, load_calibration())
    frac = chain.checks["pass_fraction"]
    ok = dyadic.upper <= 0.2 and prng.lower >= 0.8 and obs <= 0.15 and frac >= 0.9
    record(
        7,
        "effective-dimension proxies",
        ok,
        f"dyadic upper={dyadic.upper:.4f} (<= 0.2), prng lower={prng.lower:.4f} (>= 0.8), "
        f"|mdim(x:x)-dim(x)|={obs:.4f} (<= 0.15), chain pass={frac:.2f} (>= 0.9)",
    )
    assert dyadic.upper <= 0.2
    assert prng.lower >= 0.8
    assert obs <= 0.15
    assert frac >= 0.9


def _cover_instance(rng: np.random.Generator):
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 13))
    if rng.random() < 0.5:
        x = rng.integers(0, 16, size=(m, n)) / 16  # grid points: repeated distances and ties
    else:
        x = rng.random((m, n))
    delta = float(2.0 ** rng.uniform(-5, 1))
    s = float(rng.uniform(0, n))
    return PointSet.from_values(x, 30), delta, s


def _proximal_instance(rng: np.random.Generator):
    n = int(rng.integers(1, 5))
    sizes = rng.integers(1, 501, size=2)
    if rng.random() < 0.5:
        pts = [rng.integers(-8, 8, size=(k, n)) / 8 for k in sizes]
        delta = float(rng.choice([0.125, 0.25, 0.625, 0.5 * math.sqrt(2), 1.0]))  # hits exact distances
    else:
        pts = [rng.uniform(-1, 1, size=(k, n)) for k in sizes]
        delta = float(2.0 ** rng.uniform(-8, 0))
    return PointSet.from_values(pts[0], 30), PointSet.from_values(pts[1], 30), delta


def test_criterion_8_oracle_equivalence():
    rng = np.random.default_rng(8)
    cover_bad = 0
    for _ in range(1000):
        E, delta, s = _cover_instance(rng)
        greedy = hausdorff_sum(greedy_cover(E, delta), s)
        best = optimal_cover_sum(E.values, delta, s, E.precision)
        cover_bad += greedy < best * (1 - 1e-12)
    prox_bad = 0
    for _ in range(200):
        E, F, delta = _proximal_instance(rng)
        prox_bad += proximal_intersection(E, F, delta) != brute_force_intersection(E, F, delta)
    ok = cover_bad == 0 and prox_bad == 0
    record(8, "oracle equivalence", ok, f"greedy below optimum in {cover_bad}/1000, proximal != brute force in {prox_bad}/200")
    assert cover_bad == 0
    assert prox_bad == 0


def test_criterion_9_reproducibility(koch6):
    K = koch_snowflake(5)
    C = cantor_set(1 / 3, 8)
    runs = {
        "intersection": lambda: intersection_campaign(K, K, count=30, params=CampaignParams(seed=5)),
        "packing": lambda: packing_intersection_campaign(K, K, count=30, params=CampaignParams(seed=5)),
        "motion": lambda: motion_campaign(K, K, count=30, params=CampaignParams(seed=5)),
        "similarity": lambda: motion_campaign(K, K, count=30, params=CampaignParams(seed=5), scale=2.0),
        "product": lambda: product_campaign(C, C),
        "invariance": lambda: invariance_campaign([K], [1, RigidMotion.planar(0.3)]),
        "chain": lambda: chain_campaign(prng_pairs(5, 20, 512), 512),
        "probe": lambda: p2s_probe(C, 50, seed=5),
    }
    differing = []
    for name, run in runs.items():
        a, b = run(), run()
        if a.to_json() != b.to_json() or a.to_csv() != b.to_csv():
            differing.append(name)
    ok = not differing
    record(9, "reproducibility", ok, f"{len(runs) - len(differing)}/{len(runs)} campaign kinds byte-identical on re-run")
    assert ok, differing
