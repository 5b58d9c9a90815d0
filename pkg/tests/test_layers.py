from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from balshift.exact import GOLDEN_CONJUGATE, irrational_between
from balshift.grid2d import Pattern2D, Rect
from balshift.layers import (
    Characteristic,
    ConstructionError,
    EventuallyPeriodic,
    LayeredPattern,
    LayerInputError,
    SequencePair,
    build_point_window,
    classify_pair,
    fill_layers,
    in_char_orbit,
    periodic,
    row_freedom,
    slope_window_estimate,
    sturmian_approx_window,
    verify_c1_forward,
    x_rules,
)
from balshift.words import joint_slope_interval

SKEW = EventuallyPeriodic("01", "0100101101", "01")
HALF = Characteristic(Fraction(1, 2))


def _grid(p, k, rect):
    return [[p[(x, y)][k - 1] for x in range(rect.x0, rect.x1 + 1)] for y in range(rect.y1, rect.y0 - 1, -1)]


def test_rules_examples():
    X = x_rules()
    assert len(X.forbidden) == 104 and X.type_t == 2
    zero = Pattern2D.fill(Rect(0, 0, 2, 2), lambda x, y: (0, 0, 0))
    assert X.validate(zero)
    assert not X.validate(Pattern2D({(0, 0): (0, 0, 0), (0, 1): (1, 0, 0)}))
    # third layer jumps by one while both first layers are 0
    assert not X.validate(Pattern2D({(0, 0): (0, 0, 0), (1, 0): (0, 0, 1)}))


def test_periodic_pair_example():
    rect = Rect(0, 0, 1, 1)
    w = build_point_window(SequencePair(periodic("01"), periodic("01")), rect)
    assert _grid(w.pattern, 1, rect) == [[0, 1], [0, 1]]
    assert _grid(w.pattern, 2, rect) == [[1, 0], [0, 1]]
    assert _grid(w.pattern, 3, rect) == [[1, 0], [0, 0]]
    assert verify_c1_forward(w)
    assert LayeredPattern.from_text(w.to_text()) == w


def test_zero_pair_is_zero():
    rect = Rect(-2, -2, 2, 2)
    z = periodic("0")
    w = build_point_window(SequencePair(z, z), rect)
    assert set(w.pattern.cells.values()) == {(0, 0, 0)}
    assert row_freedom(w) == set(range(-2, 3)) == w.free_rows


def test_free_rows_set_to_one():
    rect = Rect(0, 0, 4, 4)
    x = Characteristic(Fraction(2, 5))
    w = build_point_window(SequencePair(x, x), rect, {0: 1})
    assert x_rules().validate(w.pattern)
    assert {v[2] for v in w.pattern.cells.values()} <= {0, 1}
    assert all(w.pattern[(i, 0)][2] == 1 for i in range(5))


def test_forced_row_rejected():
    with pytest.raises(LayerInputError):
        build_point_window(SequencePair(periodic("01"), periodic("01")), Rect(0, 0, 1, 1), {1: 1})


def test_unbalanced_pair_rejected():
    with pytest.raises(ConstructionError):
        build_point_window(SequencePair(periodic("0"), periodic("1")), Rect(0, 0, 3, 3))


def test_row_freedom_periodic_rows():
    w = build_point_window(SequencePair(periodic("01"), periodic("01")), Rect(0, -3, 3, 3))
    assert row_freedom(w) == {-2, 0, 2}


char_pairs = st.builds(
    lambda p, q, ka, kb, ia, ib: (Characteristic(Fraction(p, q), ka, Fraction(ia, 7)), Characteristic(Fraction(p, q), kb, Fraction(ib, 5))),
    st.integers(0, 7),
    st.integers(7, 9),
    st.sampled_from(["lower", "upper"]),
    st.sampled_from(["lower", "upper"]),
    st.integers(-20, 20),
    st.integers(-20, 20),
)


@settings(max_examples=40, deadline=None)
@given(char_pairs, st.integers(-6, 6), st.integers(-6, 6))
def test_construction_satisfies_rules(pair, x0, y0):
    a, b = pair
    rect = Rect(x0, y0, x0 + 3, y0 + 3)
    w = build_point_window(SequencePair(a, b), rect)
    assert verify_c1_forward(w)
    assert {v[2] for v in w.pattern.cells.values()} <= {0, 1}
    # the backtracking fill agrees that the first two layers admit a third
    fs = {c: v[:2] for c, v in w.pattern.cells.items()}
    assert fill_layers(fs, rect) is not None


def test_finite_slope_cases():
    # slope 0 and slope 1: both sequences constant, every row free
    for word in ("0", "1"):
        w = build_point_window(SequencePair(periodic(word), periodic(word)), Rect(0, 0, 3, 3))
        assert row_freedom(w) == {0, 1, 2, 3}


def test_classification_examples():
    x = Characteristic(Fraction(2, 5))
    assert classify_pair(SequencePair(x, x)).tags == {2}
    res = classify_pair(SequencePair(SKEW, HALF))
    assert res.tags == {3}
    assert not res.a_balanced and res.b_balanced
    g = GOLDEN_CONJUGATE
    assert classify_pair(SequencePair(Characteristic(g), Characteristic(g, "upper"))).tags == {1}
    assert in_char_orbit(HALF.shift(3), Fraction(1, 2), -20, 20)
    assert not in_char_orbit(SKEW, Fraction(1, 2), -20, 20)


SKEW_BAL = EventuallyPeriodic("01", "0", "01")


def test_sturmian_case_one():
    rect = Rect(0, 0, 3, 3)
    b = periodic("01", 1)
    beta, approx, orig = sturmian_approx_window(SequencePair(SKEW_BAL, b), rect)
    assert approx == orig
    J = joint_slope_interval(SKEW_BAL.window(-4, 4), b.window(-4, 4))
    assert J.contains_closed(beta) and not isinstance(beta, Fraction)


def test_sturmian_case_two():
    # a = sigma^2 b, so row -2 has equal first and second layers
    b = SKEW_BAL.shift(-2)
    rect = Rect(0, -3, 3, 0)
    for c in (0, 1):
        beta, approx, orig = sturmian_approx_window(SequencePair(SKEW_BAL, b), rect, {-2: c})
        assert approx == orig
        assert -2 in approx.free_rows
        assert all(approx.pattern[(i, -2)][2] == c for i in range(4))


def test_sturmian_periodic_rejected():
    with pytest.raises(LayerInputError):
        sturmian_approx_window(SequencePair(periodic("01"), periodic("01")), Rect(0, 0, 2, 2))
    with pytest.raises(LayerInputError):
        sturmian_approx_window(SequencePair(Characteristic(GOLDEN_CONJUGATE), HALF), Rect(0, 0, 2, 2))


def test_slope_estimate_examples():
    iv = slope_window_estimate("00101")
    assert (iv.lo, iv.hi) == (0, Fraction(4, 5))
    iv = slope_window_estimate("0" * 100)
    assert (iv.lo, iv.hi) == (0, Fraction(1, 50))
    iv = slope_window_estimate("01" * 50)
    assert (iv.lo, iv.hi) == (Fraction(12, 25), Fraction(13, 25))


@settings(max_examples=40, deadline=None)
@given(st.fractions(0, 1, max_denominator=30), st.fractions(0, 1, max_denominator=30), st.integers(1, 20))
def test_slope_estimate_contains_slope(lo, w, n):
    alpha = irrational_between(min(lo, w), max(lo, w)) if lo != w else lo
    rect = Rect(0, 0, n - 1, 1)
    win = build_point_window(SequencePair(Characteristic(alpha), Characteristic(alpha, "upper")), rect)
    assert slope_window_estimate(win).contains_closed(alpha)
