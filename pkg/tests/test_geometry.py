import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractaldim.geometry import (
    Point,
    PointSet,
    ProductTooLarge,
    RigidMotion,
    WorkspaceError,
    apply_motion,
    brute_force_intersection,
    cartesian_product,
    diameter,
    dyadic_cell,
    nearest_distances,
    proximal_intersection,
    thickened_mask,
    translate,
)
from fractaldim.generators import cantor_set, koch_snowflake

P = 30


def ps(values, precision=P):
    return PointSet.from_values(values, precision)


# --- dyadic_cell -------------------------------------------------------------


def test_dyadic_cell_examples():
    assert dyadic_cell(Point.from_values([0.75]), 1) == (1,)
    assert dyadic_cell(Point.from_values([0, 0]), 17) == (0, 0)
    assert dyadic_cell(Point.from_values([0.3125, 0.625]), 3) == (2, 5)


def test_dyadic_cell_negative_coordinates_floor():
    assert dyadic_cell(Point.from_values([-0.25]), 1) == (-1,)


def test_dyadic_cell_rejects_scale_beyond_precision():
    with pytest.raises(ValueError, match="scale beyond stored precision"):
        dyadic_cell(Point.from_values([0.5], 10), 11)


@given(st.fractions(min_value=-2, max_value=2), st.integers(0, P))
def test_dyadic_cell_is_floor(x, r):
    pt = Point.from_values([x], P)
    assert dyadic_cell(pt, r) == (math.floor(Fraction(pt.coords[0], 2**P) * 2**r),)


# --- PointSet -----------------------------------------------------------------


def test_pointset_canonical_dedup_and_order():
    s = ps([[1, 0], [0, 1], [1, 0], [0, 0]])
    assert len(s) == 3
    assert s.mantissas.tolist() == sorted(s.mantissas.tolist())


def test_pointset_workspace_and_dimension_limits():
    with pytest.raises(WorkspaceError):
        ps([[3.0]])
    with pytest.raises(ValueError):
        PointSet(np.zeros((2, 5), dtype=np.int64))
    with pytest.raises(TypeError):
        PointSet(np.array([[0.5]]))
    e = PointSet.empty(2)
    assert len(e) == 0 and e.ambient_dim == 2


def test_pointset_is_immutable():
    s = ps([[0.5]])
    with pytest.raises(ValueError):
        s.mantissas[0, 0] = 1


def test_rounding_is_ties_to_even():
    # 2**-31 is half a unit at p = 30: ties go to the even mantissa
    s = PointSet.from_values([[2.0**-31], [3 * 2.0**-31]], P)
    assert s.mantissas.ravel().tolist() == [0, 2]
    assert Point.from_values([Fraction(3, 2**31)], P).coords == (2,)


# --- diameter -------------------------------------------------------------------


def test_diameter_examples():
    assert diameter(ps([[0, 0]])) == 0
    assert diameter(ps([[0, 0], [1, 0], [0, 1]])) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert diameter(ps([[0], [1]])) == 1
    with pytest.raises(ValueError, match="diameter of empty set"):
        diameter(PointSet.empty(1))


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=200))
def test_diameter_matches_brute_force(rows):
    s = ps(rows)
    v = s.values
    brute = max(math.dist(a, b) for a in v for b in v)
    assert diameter(s) == pytest.approx(brute, abs=1e-12)


def test_diameter_large_set_uses_hull_consistently():
    s = koch_snowflake(4)
    v = s.values
    d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(-1)
    assert diameter(s) == pytest.approx(math.sqrt(d2.max()), abs=1e-12)


# --- cartesian_product -------------------------------------------------------------


def test_product_examples():
    assert cartesian_product(ps([[0]]), ps([[0]])).mantissas.tolist() == [[0, 0]]
    assert len(cartesian_product(ps([[0], [1]]), ps([[0], [0.5], [1]]))) == 6
    c = cantor_set(1 / 3, 5)
    assert len(cartesian_product(c, c)) == 32 * 32 == 1024


def test_product_cap_and_precision():
    c = cantor_set(1 / 3, 5)
    with pytest.raises(ProductTooLarge, match="product too large"):
        cartesian_product(c, c, cap=1000)
    with pytest.raises(ValueError):
        cartesian_product(ps([[0]], 20), ps([[0]], 30))


@given(
    st.lists(st.floats(-1, 1), min_size=1, max_size=20),
    st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=20),
)
def test_product_cardinality_and_projection(a, b):
    E, F = ps([[x] for x in a]), ps(b)
    P_ = cartesian_product(E, F)
    assert len(P_) == len(E) * len(F)
    assert P_.project([0]) == E
    assert P_.project([1, 2]) == F
    assert P_ == PointSet(P_.mantissas, P)  # already canonical


# --- translate / apply_motion ----------------------------------------------------------


def test_translate_examples():
    F = ps([[0], [1]])
    assert translate(F, [0.0]) == F
    assert translate(F, [0.5]) == ps([[0.5], [1.5]])
    z = [0.123456789]
    assert translate(translate(F, z), [-z[0]]) == F
    with pytest.raises(WorkspaceError):
        translate(F, [1.5])


def test_translate_by_point_is_exact():
    F = ps([[0.1, 0.2]])
    z = Point((5, -7), P)
    assert (translate(F, z).mantissas - F.mantissas).tolist() == [[5, -7]]


def test_motion_examples():
    F = ps([[1, 0], [0.25, -0.5]])
    assert apply_motion(F, RigidMotion.identity(2)) == F
    R = apply_motion(ps([[1, 0]]), RigidMotion.planar(math.pi / 2))
    assert np.allclose(R.values, [[0, 1]], atol=2.0**-P)


def test_motion_validation():
    with pytest.raises(ValueError):
        RigidMotion(np.array([[1, 1], [0, 1]]), np.zeros(2))
    with pytest.raises(ValueError):
        RigidMotion(np.eye(2), np.zeros(2), scale=0)


@given(st.floats(0, 2 * math.pi), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_isometry_preserves_distances(theta, tx, ty):
    F = koch_snowflake(2)
    G = apply_motion(F, RigidMotion.planar(theta, (tx, ty)))
    if len(G) != len(F):  # rounding may merge points only if they were within 2**-p
        pytest.fail("isometry merged points")
    # apply_motion re-sorts, so compare the sorted pairwise distance multisets
    def dists(S):
        v = S.values
        d = np.sqrt(((v[:, None] - v[None]) ** 2).sum(-1))
        return np.sort(d.ravel())

    assert np.max(np.abs(dists(F) - dists(G))) <= 2.0 ** (-P + 2) * math.sqrt(2)


# --- proximal_intersection -----------------------------------------------------------


def test_proximal_examples():
    E = ps([[0], [1]])
    assert proximal_intersection(E, E, 1e-9) == E
    assert proximal_intersection(E, ps([[0.4]]), 0.45) == ps([[0]])
    assert len(proximal_intersection(ps([[0], [0.1]]), ps([[0.5]]), 0.3)) == 0
    with pytest.raises(ValueError):
        proximal_intersection(E, E, 0)


def test_proximal_threshold_is_inclusive_exactly():
    E = ps([[0.0, 0.0]])
    F = ps([[0.375, 0.5]])  # distance exactly 0.625
    assert len(proximal_intersection(E, F, 0.625)) == 1
    assert len(proximal_intersection(E, F, 0.625 - 2.0**-40)) == 0


points_2d = st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=0, max_size=60)


@given(points_2d, points_2d, st.floats(1e-4, 1.5))
def test_proximal_equals_brute_force(a, b, delta):
    E = ps(a) if a else PointSet.empty(2)
    F = ps(b) if b else PointSet.empty(2)
    assert proximal_intersection(E, F, delta) == brute_force_intersection(E, F, delta)


@given(points_2d, points_2d, st.floats(1e-3, 0.5), st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)))
def test_proximal_invariant_under_common_translation(a, b, delta, z):
    if not a or not b:
        return
    E, F = ps(a), ps(b)
    before = proximal_intersection(E, F, delta)
    after = proximal_intersection(translate(E, z), translate(F, z), delta)
    assert after == translate(before, z) if len(before) else len(after) == 0


@given(points_2d, points_2d, st.integers(1, 8))
def test_thickened_mask_matches_proximal(a, b, k):
    """Distance-based route agrees with the grid-hash route."""
    if not a or not b:
        return
    E, F = ps(a), ps(b)
    delta = 2.0**-k
    mask = thickened_mask(E, F, delta, nearest_distances(E, F))
    assert E.subset(mask) == proximal_intersection(E, F, delta)


def test_thickened_mask_on_lattice_ties():
    E = ps([[0, 0], [0.5, 0]])
    F = ps([[0.25, 0]])
    mask = thickened_mask(E, F, 0.25, nearest_distances(E, F))
    assert mask.tolist() == [True, True]
