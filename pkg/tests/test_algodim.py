from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractaldim.algodim import (
    BitEncoding,
    Calibration,
    CalibrationError,
    HEADER_OVERHEAD,
    calibrate,
    cdim_estimate,
    chain_r_list,
    chain_rule_residuals,
    complexity_profile,
    decode,
    dim_estimate,
    dyadic_point,
    encode,
    joint_point,
    load_calibration,
    mdim_estimate,
    periodic_point,
    prng_point,
    sigma,
    write_calibration,
)
from fractaldim.algodim.calibration import DEFAULT_PATH
from fractaldim.geometry import Point, dyadic_cell

R = [2048, 2560, 3072, 3584, 4096]


# --- encodings --------------------------------------------------------------------


def test_encode_examples():
    assert encode(Point.from_values([0], 30), 4).bits == "0000"
    assert encode(Point.from_values([0.5, 0.5], 30), 2).bits == "1100"
    # x = 0.11, y = 0.01 in binary
    assert encode(Point.from_values([0.75, 0.25], 30), 2, "concatenated").bits == "1101"
    assert encode(Point.from_values([0.75, 0.25], 30), 2).bits == "1011"


def test_encode_errors():
    with pytest.raises(ValueError, match="normalize to unit cube first"):
        encode(Point.from_values([-0.25], 30), 4)
    with pytest.raises(ValueError, match="normalize to unit cube first"):
        encode(Point.from_values([1.0], 30), 4)
    with pytest.raises(ValueError):
        encode(Point.from_values([0.5], 10), 11)
    with pytest.raises(ValueError):
        BitEncoding("0101", 3, 1)


@given(
    st.lists(st.fractions(min_value=0, max_value=Fraction(2**30 - 1, 2**30)), min_size=1, max_size=4),
    st.integers(0, 30),
    st.sampled_from(["interleaved", "concatenated"]),
)
def test_encode_decode_round_trip(coords, r, scheme):
    x = Point.from_values(coords, 30)
    enc = encode(x, r, scheme)
    assert len(enc) == x.n * r
    assert decode(enc) == dyadic_cell(x, r)


def test_interleaving_preserves_locality():
    a = Point.from_values([0.3, 0.6], 30)
    b = Point.from_values([0.3 + 2**-20, 0.6], 30)
    ea, eb = encode(a, 30).bits, encode(b, 30).bits
    common = next(i for i, (u, v) in enumerate(zip(ea, eb)) if u != v)
    assert common >= 2 * 19


# --- density estimates ---------------------------------------------------------------


def test_density_examples():
    assert dim_estimate(dyadic_point([Fraction(3, 8)]), R).upper <= 0.2
    assert dim_estimate(prng_point(1), R).lower >= 0.8
    x = prng_point(2)
    half = Point((x.coords[0], 0), x.precision)
    est = dim_estimate(half, R)
    assert 0.8 <= est.lower <= est.upper <= 1.2


def test_density_bounds_and_errors():
    x = prng_point(3, 2)
    est = dim_estimate(x, R)
    assert 0 <= est.lower <= est.upper <= 2 + HEADER_OVERHEAD / R[0]
    with pytest.raises(ValueError):
        dim_estimate(x, R[:3])
    with pytest.raises(ValueError):
        dim_estimate(x, [4096, 3584, 3072, 2560])
    with pytest.raises(ValueError):
        dim_estimate(prng_point(3, 1, 1024), R)


def test_complexity_profile_csv():
    prof = complexity_profile(periodic_point("0110", 1, 1024), [256, 512, 768, 1024])
    lines = prof.to_csv().splitlines()
    assert lines[0] == "r,klen,ratio"
    assert len(lines) == 5
    assert all(q <= 1 + HEADER_OVERHEAD / r for q, r in zip(prof.ratios, prof.precisions))


def test_mutual_and_conditional_examples():
    x, y = prng_point(4), prng_point(5)
    dx = dim_estimate(x, R)
    mxx = mdim_estimate(x, x, R)
    assert abs(mxx.lower - dx.lower) <= 0.15 and abs(mxx.upper - dx.upper) <= 0.15
    assert cdim_estimate(x, x, R).upper <= 0.2
    assert cdim_estimate(x, x, R, "primed").upper <= 0.2
    assert mdim_estimate(x, y, R).upper <= 0.15
    with pytest.raises(KeyError):
        cdim_estimate(x, y, R, "guess")


# --- chain rule ----------------------------------------------------------------------


def test_chain_r_list():
    assert chain_r_list(4096) == R
    with pytest.raises(ValueError):
        chain_r_list(8)


def test_chain_examples():
    cal = load_calibration()
    x, y = prng_point(6), prng_point(7)
    res = chain_rule_residuals(x, y, 4096, cal)
    assert res.dim_xy.lower == pytest.approx(2, abs=0.2)
    assert res.dim_x.lower + res.dim_y_given_x.lower == pytest.approx(2, abs=0.3)
    assert res.ok and res.sigma == sigma(4096, cal.c0, cal.c1)
    same = chain_rule_residuals(x, x, 4096, cal)
    # duplicated coordinates: the pair costs one point plus a copy, within two slack budgets
    assert abs(same.dim_xy.lower - same.dim_x.lower) <= 2 * same.slack
    assert same.residuals[0] >= -same.slack


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**32), st.sampled_from([256, 1024, 2048]))
def test_first_chain_link_within_slack(a, b, r):
    res = chain_rule_residuals(prng_point(a, 1, r), prng_point(b, 1, r), r)
    assert res.residuals[0] >= -res.slack


# --- calibration file ------------------------------------------------------------------------


def test_shipped_calibration_is_reproducible(tmp_path):
    fresh = tmp_path / "cal.txt"
    write_calibration(fresh)
    assert fresh.read_bytes() == DEFAULT_PATH.read_bytes()
    assert calibrate() == load_calibration()


def test_calibration_refusals(tmp_path):
    with pytest.raises(CalibrationError, match="not found"):
        load_calibration(tmp_path / "missing.txt")
    text = DEFAULT_PATH.read_text()
    stale = tmp_path / "stale.txt"
    stale.write_text(text.replace("version = 1", "version = 0"))
    with pytest.raises(CalibrationError, match="does not match"):
        load_calibration(stale)
    other = tmp_path / "other.txt"
    other.write_text(text.replace("encoder = swgamma-1", "encoder = lz78-0"))
    with pytest.raises(CalibrationError):
        load_calibration(other)
    partial = tmp_path / "partial.txt"
    partial.write_text("version = 1\n")
    with pytest.raises(CalibrationError, match="lacks"):
        load_calibration(partial)
    assert Calibration.from_text(load_calibration().to_text()) == load_calibration()
