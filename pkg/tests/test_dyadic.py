import pickle
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from capped_nn import dyadic as dy
from capped_nn.dyadic import Order

from conftest import D, frac


@st.composite
def points(draw, max_e=200):
    e = draw(st.integers(0, max_e))
    m = draw(st.integers(0, 1 << e))
    return dy.normalize(m, e)


@st.composite
def near_pairs(draw):
    """Two points that agree up to a deep bit position."""
    e = draw(st.integers(1, 4096))
    m = draw(st.integers(0, (1 << e) - 1))
    j = draw(st.integers(1, e))
    other = m ^ (1 << (e - j))
    return dy.normalize(m, e), dy.normalize(other, e)


def test_normalize_examples():
    assert (dy.normalize(6, 3).numerator, dy.normalize(6, 3).exponent) == (3, 2)
    z = dy.normalize(0, 5)
    assert (z.numerator, z.exponent) == (0, 0)
    one = dy.normalize(1 << 10, 10)
    assert (one.numerator, one.exponent) == (1, 0)


def test_normalize_rejects_out_of_range():
    with pytest.raises(dy.DyadicError):
        dy.normalize(5, 2)
    with pytest.raises(dy.DyadicError):
        dy.normalize(-1, 3)


def test_precision_cap_enforced(small_cap):
    with pytest.raises(dy.PrecisionError):
        dy.normalize(1, 65)
    dy.normalize(1, 64)


def test_arith_examples():
    assert dy.abs_diff(D("1/2"), D("1/2")) == dy.ZERO
    assert dy.abs_diff(D("3/8"), D("1/8")) == D("1/4")
    assert dy.add(D("1/4"), D("1/8")) == D("3/8")
    assert dy.shift_right(dy.ONE, 3) == D("1/8")
    assert dy.shift_right(dy.ZERO, 100) == dy.ZERO
    assert dy.shift_right(D("3/8"), 2) == D("3/32")


def test_add_leaving_unit_interval_rejected():
    with pytest.raises(dy.DyadicError):
        dy.add(D("3/4"), D("1/2"))


def test_compare_examples():
    assert dy.compare(D("1/2"), D("1/2")) is Order.EQUAL
    a = dy.normalize((1 << 79) - 1, 80)  # 1/2 - 2^-80
    # doubles cannot separate these, so the filter must abstain
    assert dy.filter_compare(a, D("1/2")) is None
    assert dy.compare(a, D("1/2")) is Order.LESS
    assert dy.compare(D("3/8"), D("5/8")) is Order.LESS


def test_filter_decides_easy_cases():
    assert dy.filter_compare(D("1/4"), D("3/4")) is Order.LESS
    assert dy.filter_compare(D("3/4"), D("1/4")) is Order.GREATER


def test_order_examples():
    assert dy.order_of(D("5/8")) == 3
    assert dy.order_of(D("1/2")) == 1
    assert dy.order_of(D("7/1024")) == 10
    with pytest.raises(dy.DyadicError):
        dy.order_of(dy.ZERO)


def _enumerate_closest(d: dy.Dyadic, p: int) -> list[dy.Dyadic]:
    """D_p sorted by (distance to d, value): the brute-force definition."""
    members = [dy.normalize(m, p) for m in range(1, 1 << p, 2)]
    return sorted(members, key=lambda x: (abs(frac(x) - frac(d)), frac(x)))


def test_nth_closest_examples():
    d = D("3/8")
    assert dy.nth_closest_dyadic(d, 3, 1) == D("3/8")
    assert dy.nth_closest_dyadic(d, 3, 2) == D("1/8")
    assert dy.nth_closest_dyadic(d, 3, 4) == D("7/8")


@pytest.mark.parametrize("p", range(1, 9))
def test_nth_closest_matches_enumeration(p):
    for m in range(1, 1 << p, 2):
        d = dy.normalize(m, p)
        want = _enumerate_closest(d, p)
        got = dy.closest_dyadics(d, p, len(want))
        assert got == want


def test_nth_closest_rejects_bad_arguments():
    with pytest.raises(dy.DyadicError):
        dy.nth_closest_dyadic(D("1/4"), 3, 1)
    with pytest.raises(dy.DyadicError):
        dy.nth_closest_dyadic(D("3/8"), 3, 5)


@given(st.integers(1, 300), st.data())
def test_nth_closest_distance_properties(p, data):
    m = 2 * data.draw(st.integers(0, (1 << (p - 1)) - 1)) + 1
    d = dy.Dyadic(m, p)
    n = min(1 << (p - 1), 40)
    out = dy.closest_dyadics(d, p, n)
    dists = [frac(dy.abs_diff(x, d)) for x in out]
    assert dists == sorted(dists)
    assert len(set(out)) == len(out)
    for i, x in enumerate(out, start=1):
        assert x.exponent == p and x.numerator % 2 == 1
        assert dists[i - 1] <= Fraction(i, 1 << (p - 1))


@given(points(), points())
def test_compare_matches_fractions(a, b):
    fa, fb = frac(a), frac(b)
    want = Order.LESS if fa < fb else Order.GREATER if fa > fb else Order.EQUAL
    assert dy.compare(a, b) is want
    assert dy.exact_compare(a, b) is want
    f = dy.filter_compare(a, b)
    assert f is None or f is want


@given(near_pairs())
def test_compare_near_ties(pair):
    a, b = pair
    fa, fb = frac(a), frac(b)
    want = Order.LESS if fa < fb else Order.GREATER if fa > fb else Order.EQUAL
    assert dy.compare(a, b) is want
    assert dy.compare(b, a) is Order(-want)


@given(points(), points(), points())
def test_abs_diff_is_a_metric(a, b, c):
    assert dy.abs_diff(a, b) == dy.abs_diff(b, a)
    assert (dy.abs_diff(a, b) == dy.ZERO) == (a == b)
    assert frac(dy.abs_diff(a, c)) <= frac(dy.abs_diff(a, b)) + frac(dy.abs_diff(b, c))


@given(points(), points(), st.integers(0, 300))
def test_shift_distributes_over_add(a, b, j):
    assume(frac(a) + frac(b) <= 1)
    s = dy.add(a, b)
    assert dy.shift_right(s, j) == dy.add(dy.shift_right(a, j), dy.shift_right(b, j))
    assert frac(dy.shift_right(s, j)) == (frac(a) + frac(b)) / (1 << j)


@given(points(), points())
def test_sub_and_add_agree_with_fractions(a, b):
    assert frac(dy.sub(a, b)) == frac(a) - frac(b)
    if frac(a) + frac(b) <= 1:
        assert frac(dy.add(a, b)) == frac(a) + frac(b)


@given(points(max_e=3000))
def test_text_and_binary_round_trip(a):
    assert dy.parse(str(a)) == a
    assert dy.from_bytes(dy.to_bytes(a)) == a
    buf = dy.write_framed(a) + dy.write_framed(dy.HALF)
    x, pos = dy.read_framed(buf, 0)
    y, end = dy.read_framed(buf, pos)
    assert (x, y, end) == (a, dy.HALF, len(buf))
    assert pickle.loads(pickle.dumps(a)) == a


def test_parse_rejects_garbage():
    for bad in ("3/8", "x/2^3", "5/2^2", ""):
        with pytest.raises(dy.DyadicError):
            dy.parse(bad)


def test_immutable():
    with pytest.raises(AttributeError):
        D("1/2").numerator = 3


def test_fuzz_exercises_both_routes():
    from capped_nn.checks import near_tie_pairs
    from capped_nn.rng import SeededStream

    rng = SeededStream(0, ("routes",))
    abstained = sum(dy.filter_compare(*near_tie_pairs(rng)) is None for _ in range(2000))
    decided = sum(dy.filter_compare(dy.normalize(rng.bits(60), 60), dy.normalize(rng.bits(60), 60))
                  is not None for _ in range(2000))
    assert abstained > 1000 and decided > 1990
