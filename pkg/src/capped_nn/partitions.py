"""Countable partitions of [0, 1] and visited-cell counting.

A partition is a total function from points to hashable cell ids.  Points
may be :class:`~capped_nn.dyadic.Dyadic` or :class:`fractions.Fraction`;
all arithmetic is on integer numerator/denominator pairs.

``Centered(s)`` is the partition
    {s} ∪ ⋃_k [s(1 - 1/k), s(1 - 1/(k+1)))  ∪ ⋃_k (s + (1-s)/(k+1), s + (1-s)/k]
with ids ``("C",)``, ``("L", k)``, ``("R", k)``.  ``Grid(eta)`` has ids
``floor(x / eta)`` with the last cell closed at 1.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dyadic import Dyadic

__all__ = [
    "PartitionSpec",
    "Centered",
    "Grid",
    "DistinctPoints",
    "Product",
    "cell_id",
    "cell_bounds",
    "cells_visited_curve",
    "smv_ratio_report",
    "SmvReport",
    "curve_to_csv",
    "partition_from_spec",
]


def _ratio(x) -> tuple[int, int]:
    if isinstance(x, Dyadic):
        return x.numerator, 1 << x.exponent
    x = Fraction(x)
    return x.numerator, x.denominator


class PartitionSpec:
    def cell(self, x):
        raise NotImplementedError

    def cell_count(self) -> int | None:
        """Number of cells, or None when infinite."""
        return None


@dataclass(frozen=True)
class Centered(PartitionSpec):
    s: Dyadic | Fraction

    def cell(self, x):
        sn, sd = _ratio(self.s)
        xn, xd = _ratio(x)
        a, b = sn * xd, xn * sd  # s and x over the common denominator sd*xd
        if a == b:
            return ("C",)
        if b < a:
            return ("L", a // (a - b))
        one = sd * xd
        return ("R", (one - a) // (b - a))

    def bounds(self, cid):
        s = Fraction(*_ratio(self.s))
        if cid == ("C",):
            return s, s, True, True
        side, k = cid
        if side == "L":
            return s * (1 - Fraction(1, k)), s * (1 - Fraction(1, k + 1)), True, False
        return s + (1 - s) / (k + 1), s + (1 - s) / k, False, True


@dataclass(frozen=True)
class Grid(PartitionSpec):
    eta: Dyadic | Fraction

    def _cells(self) -> int:
        en, ed = _ratio(self.eta)
        return -(-ed // en)  # ceil(1 / eta)

    def cell(self, x):
        en, ed = _ratio(self.eta)
        xn, xd = _ratio(x)
        return min((xn * ed) // (xd * en), self._cells() - 1)

    def cell_count(self):
        return self._cells()

    def bounds(self, j):
        eta = Fraction(*_ratio(self.eta))
        last = j == self._cells() - 1
        return j * eta, (Fraction(1) if last else (j + 1) * eta), True, last


@dataclass(frozen=True)
class DistinctPoints(PartitionSpec):
    def cell(self, x):
        return x

    def bounds(self, x):
        v = Fraction(*_ratio(x))
        return v, v, True, True


@dataclass(frozen=True)
class Product(PartitionSpec):
    factors: tuple

    def __init__(self, factors: Iterable[PartitionSpec]):
        object.__setattr__(self, "factors", tuple(factors))

    def cell(self, x):
        return tuple(f.cell(x) for f in self.factors)

    def cell_count(self):
        n = 1
        for f in self.factors:
            c = f.cell_count()
            if c is None:
                return None
            n *= c
        return n


def cell_id(p: PartitionSpec, x):
    return p.cell(x)


def cell_bounds(p: PartitionSpec, cid) -> tuple[Fraction, Fraction, bool, bool]:
    """``(lo, hi, lo_closed, hi_closed)`` of a cell."""
    return p.bounds(cid)


def in_bounds(x, bounds) -> bool:
    lo, hi, lc, hc = bounds
    v = Fraction(*_ratio(x))
    return (lo < v or (lc and v == lo)) and (v < hi or (hc and v == hi))


def cells_visited_curve(traj, p: PartitionSpec, checkpoints: Sequence[int]) -> list[tuple[int, int]]:
    """Distinct cells hit by the first T samples, for each checkpoint T."""
    if list(checkpoints) != sorted(checkpoints):
        raise ValueError("checkpoints must be sorted")
    points = traj.points if hasattr(traj, "points") else list(traj)
    if checkpoints and checkpoints[-1] > len(points):
        raise ValueError("checkpoint beyond trajectory horizon")
    seen = set()
    out = []
    t = 0
    for T in checkpoints:
        while t < T:
            seen.add(p.cell(points[t]))
            t += 1
        out.append((T, len(seen)))
    return out


@dataclass
class SmvReport:
    checkpoints: list
    counts: list
    ratios: list
    verdict: str


def smv_ratio_report(curve: Sequence[tuple[int, int]]) -> SmvReport:
    """count(T)/T at each checkpoint and a coarse trend verdict.

    ``linear`` if the last ratio exceeds 0.5; ``shrinking`` if it is below
    both 0.1 and half the first ratio; ``flat`` otherwise.
    """
    if not curve:
        raise ValueError("empty curve")
    Ts = [T for T, _ in curve]
    counts = [c for _, c in curve]
    ratios = [c / T for T, c in curve]
    first, last = ratios[0], ratios[-1]
    if last > 0.5:
        verdict = "linear"
    elif last < 0.1 and last < first / 2:
        verdict = "shrinking"
    else:
        verdict = "flat"
    return SmvReport(Ts, counts, ratios, verdict)


def curve_to_csv(report: SmvReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "count", "ratio"])
    for T, c, r in zip(report.checkpoints, report.counts, report.ratios):
        w.writerow([T, c, f"{r:.6f}"])
    return buf.getvalue()


def partition_from_spec(spec: dict | str) -> PartitionSpec:
    """``{"name": "grid", "eta": "1/2^10"}``, ``"distinct_points"``, ..."""
    from .dyadic import parse

    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec["name"]
    if name == "grid":
        return Grid(parse(spec.get("eta", "1/2^10")))
    if name == "centered":
        return Centered(parse(spec.get("s", "1/2^1")))
    if name == "distinct_points":
        return DistinctPoints()
    if name == "product":
        return Product(partition_from_spec(f) for f in spec["factors"])
    raise ValueError(f"unknown partition {name!r}")
