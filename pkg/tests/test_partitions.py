import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from capped_nn import dyadic as dy
from capped_nn.partitions import (
    Centered,
    DistinctPoints,
    Grid,
    Product,
    cell_bounds,
    cell_id,
    cells_visited_curve,
    curve_to_csv,
    in_bounds,
    partition_from_spec,
    smv_ratio_report,
)
from capped_nn.processes import gen_enumerated_fresh, gen_finite_support, gen_iid_uniform

from conftest import D


def test_centered_examples():
    c = Centered(D("1/2"))
    assert cell_id(c, Fraction(3, 10)) == ("L", 2)
    assert Fraction(1, 4) <= Fraction(3, 10) < Fraction(1, 3)
    assert cell_id(c, D("1/2")) == ("C",)
    assert cell_id(c, dy.ZERO) == ("L", 1)
    assert cell_id(c, dy.ONE) == ("R", 1)


def test_grid_examples():
    g = Grid(D("1/2"))
    assert [cell_id(g, x) for x in (D("1/4"), D("1/4"), D("3/4"))] == [0, 0, 1]
    assert cell_id(g, dy.ONE) == 1
    assert Grid(Fraction(1, 3)).cell_count() == 3


fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=10**6)


@given(fractions01, fractions01)
def test_centered_cell_contains_point(s, x):
    if s in (0, 1):
        return
    c = Centered(s)
    assert in_bounds(x, cell_bounds(c, cell_id(c, x)))


@given(fractions01, st.integers(1, 4000))
def test_grid_cell_contains_point(x, q):
    g = Grid(Fraction(1, q))
    j = cell_id(g, x)
    assert 0 <= j < q
    assert in_bounds(x, cell_bounds(g, j))


@given(st.lists(fractions01, min_size=2, max_size=30))
def test_cells_are_disjoint(xs):
    c = Centered(Fraction(2, 5))
    for x in xs:
        for y in xs:
            same = cell_id(c, x) == cell_id(c, y)
            assert same == in_bounds(y, cell_bounds(c, cell_id(c, x)))


def test_product_refines():
    p = Product([Grid(D("1/2")), Centered(D("1/4"))])
    assert cell_id(p, D("1/8")) == (0, cell_id(Centered(D("1/4")), D("1/8")))
    assert p.cell_count() is None
    assert Product([Grid(D("1/2")), Grid(D("1/4"))]).cell_count() == 8


def test_finite_support_saturates():
    t = gen_finite_support(0, [D("1/4"), D("3/4")], 2000)
    curve = cells_visited_curve(t, Grid(D("1/2")), [10, 100, 2000])
    assert [c for _, c in curve] == [2, 2, 2]
    assert smv_ratio_report(curve).verdict == "shrinking"


def test_distinct_points_on_enumerated():
    t = gen_enumerated_fresh(4096)
    curve = cells_visited_curve(t, DistinctPoints(), [256, 1024, 4096])
    assert [c for _, c in curve] == [256, 1024, 4096]
    rep = smv_ratio_report(curve)
    assert rep.ratios == [1.0, 1.0, 1.0] and rep.verdict == "linear"


def test_grid_count_bounded():
    t = gen_iid_uniform(1, 5000)
    curve = cells_visited_curve(t, Grid(dy.normalize(1, 10)), [256, 5000])
    assert all(c <= 1024 for _, c in curve)
    assert curve[-1][1] > 900


def test_ratio_report_examples():
    curve = [(T, math.isqrt(T - 1) + 1) for T in (100, 10000)]  # ceil(sqrt(T))
    rep = smv_ratio_report(curve)
    assert rep.ratios == [0.1, 0.01] and rep.verdict == "shrinking"
    assert smv_ratio_report([(10, 5), (100, 5), (1000, 5)]).verdict == "shrinking"
    assert smv_ratio_report([(10, 10), (100, 100)]).verdict == "linear"
    assert smv_ratio_report([(10, 3), (100, 30)]).verdict == "flat"


def test_curve_csv_schema():
    rep = smv_ratio_report([(4, 4), (8, 6)])
    assert curve_to_csv(rep).splitlines() == ["T,count,ratio", "4,4,1.000000", "8,6,0.750000"]


def test_curve_errors():
    t = gen_enumerated_fresh(10)
    with pytest.raises(ValueError):
        cells_visited_curve(t, Grid(D("1/2")), [5, 3])
    with pytest.raises(ValueError):
        cells_visited_curve(t, Grid(D("1/2")), [11])
    with pytest.raises(ValueError):
        smv_ratio_report([])


def test_partition_from_spec():
    assert partition_from_spec({"name": "grid", "eta": "1/2^10"}) == Grid(dy.normalize(1, 10))
    assert partition_from_spec("distinct_points") == DistinctPoints()
    assert partition_from_spec({"name": "centered", "s": "1/2^1"}) == Centered(dy.HALF)
    with pytest.raises(ValueError):
        partition_from_spec("voronoi")
