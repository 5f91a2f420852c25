"""Exact dyadic rationals m / 2**e on [0, 1].

Every point handled by the simulator is a :class:`Dyadic`.  Values are
immutable and kept in normal form (odd numerator, or ``0/2^0``), so two
dyadics are equal iff their ``(numerator, exponent)`` pairs are equal and
the pair doubles as a hash key.

Ordering goes through a floating-point filter first: each value carries a
lazily computed double approximation with a guaranteed error bound, and the
exact big-integer comparison only runs when the two error intervals overlap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

__all__ = [
    "ApproxFloat",
    "Dyadic",
    "DyadicError",
    "PrecisionError",
    "Order",
    "ZERO",
    "ONE",
    "HALF",
    "normalize",
    "add",
    "sub",
    "abs_diff",
    "shift_right",
    "compare",
    "exact_compare",
    "filter_compare",
    "order_of",
    "nth_closest_dyadic",
    "closest_dyadics",
    "parse",
    "to_bytes",
    "from_bytes",
    "DEFAULT_PRECISION_CAP",
]

DEFAULT_PRECISION_CAP = 1 << 20

_precision_cap = DEFAULT_PRECISION_CAP

_TINY = math.ldexp(1.0, -1073)


class DyadicError(ValueError):
    pass


class PrecisionError(DyadicError):
    """Raised when an exponent exceeds the configured hard cap."""


def set_precision_cap(bits: int) -> int:
    """Set the global exponent cap, returning the previous value."""
    global _precision_cap
    if bits < 1:
        raise ValueError("precision cap must be positive")
    old, _precision_cap = _precision_cap, bits
    return old


def get_precision_cap() -> int:
    return _precision_cap


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class ApproxFloat:
    """A double with ``|value - exact| <= error_bound``."""

    value: float
    error_bound: float

    def disjoint_from(self, other: "ApproxFloat") -> bool:
        return (self.value + self.error_bound < other.value - other.error_bound
                or other.value + other.error_bound < self.value - self.error_bound)


def _approx(m: int, e: int) -> ApproxFloat:
    if m == 0:
        return ApproxFloat(0.0, 0.0)
    neg = m < 0
    mag = -m if neg else m
    s = max(0, mag.bit_length() - 53)
    # mag >> s fits in 53 bits, so float() is exact; truncation loses < 2**s
    # units and the ldexp may round once if the result is subnormal.
    v = math.ldexp(float(mag >> s), s - e)
    err = (math.ldexp(1.0, s - e + 1) if s else 0.0) + _TINY
    return ApproxFloat(-v if neg else v, err)


class Dyadic:
    """The number ``numerator / 2**exponent`` in normal form.

    Construct points through :func:`normalize`; the bare constructor trusts
    its arguments.  Signed values only appear as intermediates of
    :func:`sub` and are accepted by :func:`add` and :func:`shift_right`.
    """

    __slots__ = ("numerator", "exponent", "_approx")

    def __init__(self, numerator: int, exponent: int):
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "_approx", None)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    def __reduce__(self):
        return (Dyadic, (self.numerator, self.exponent))

    @property
    def approx(self) -> ApproxFloat:
        a = self._approx
        if a is None:
            a = _approx(self.numerator, self.exponent)
            object.__setattr__(self, "_approx", a)
        return a

    @property
    def is_point(self) -> bool:
        return self.numerator >= 0 and (self.numerator >> self.exponent == 0 or self.is_one)

    @property
    def is_one(self) -> bool:
        return self.numerator == 1 and self.exponent == 0

    def __float__(self) -> float:
        return self.approx.value

    def __eq__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.numerator, self.exponent))

    def __lt__(self, other):
        return compare(self, other) is Order.LESS

    def __le__(self, other):
        return compare(self, other) is not Order.GREATER

    def __gt__(self, other):
        return compare(self, other) is Order.GREATER

    def __ge__(self, other):
        return compare(self, other) is not Order.LESS

    def __repr__(self):
        return f"Dyadic({self})"

    def __str__(self):
        return f"{self.numerator}/2^{self.exponent}"

    def as_ratio(self) -> tuple[int, int]:
        return self.numerator, 1 << self.exponent


def _make(m: int, e: int) -> Dyadic:
    if m == 0:
        return ZERO
    tz = (m & -m).bit_length() - 1
    if tz:
        shift = min(tz, e)
        m >>= shift
        e -= shift
    if e > _precision_cap:
        raise PrecisionError(f"exponent {e} exceeds precision cap {_precision_cap}")
    return Dyadic(m, e)


def normalize(m: int, e: int) -> Dyadic:
    """Return the point m / 2**e in normal form.  Requires 0 <= m <= 2**e."""
    if e < 0 or m < 0:
        raise DyadicError(f"negative numerator or exponent: ({m}, {e})")
    if m > (1 << e):
        raise DyadicError(f"{m}/2^{e} lies above 1")
    return _make(m, e)


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)
HALF = Dyadic(1, 1)


def _aligned(a: Dyadic, b: Dyadic) -> tuple[int, int, int]:
    e = max(a.exponent, b.exponent)
    return a.numerator << (e - a.exponent), b.numerator << (e - b.exponent), e


def add(a: Dyadic, b: Dyadic) -> Dyadic:
    """Exact sum; the result must be a point of [0, 1]."""
    x, y, e = _aligned(a, b)
    s = x + y
    if s < 0 or s > (1 << e):
        raise DyadicError(f"sum {a} + {b} leaves [0, 1]")
    return _make(s, e)


def sub(a: Dyadic, b: Dyadic) -> Dyadic:
    """Exact signed difference a - b (may be negative)."""
    x, y, e = _aligned(a, b)
    d = x - y
    if d < 0:
        r = _make(-d, e)
        return Dyadic(-r.numerator, r.exponent)
    return _make(d, e)


def abs_diff(a: Dyadic, b: Dyadic) -> Dyadic:
    """The metric |a - b| on [0, 1]."""
    x, y, e = _aligned(a, b)
    return _make(abs(x - y), e)


def shift_right(a: Dyadic, j: int) -> Dyadic:
    """Exact a / 2**j."""
    if j < 0:
        raise DyadicError("shift must be non-negative")
    if a.numerator == 0:
        return ZERO
    e = a.exponent + j
    if e > _precision_cap:
        raise PrecisionError(f"exponent {e} exceeds precision cap {_precision_cap}")
    return Dyadic(a.numerator, e)


def exact_compare(a: Dyadic, b: Dyadic) -> Order:
    x, y, _ = _aligned(a, b)
    if x < y:
        return Order.LESS
    if x > y:
        return Order.GREATER
    return Order.EQUAL


def filter_compare(a: Dyadic, b: Dyadic) -> Order | None:
    """Decide the order from the float approximations alone, or return None."""
    fa, fb = a.approx, b.approx
    if fa.value + fa.error_bound < fb.value - fb.error_bound:
        return Order.LESS
    if fb.value + fb.error_bound < fa.value - fa.error_bound:
        return Order.GREATER
    return None


def compare(a: Dyadic, b: Dyadic) -> Order:
    r = filter_compare(a, b)
    if r is not None:
        return r
    return exact_compare(a, b)


def order_of(a: Dyadic) -> int:
    """The p with a in D_p = {odd i / 2**p}."""
    if a.numerator <= 0 or a.is_one:
        raise DyadicError(f"{a} is not a dyadic of positive order")
    return a.exponent


def _side_counts(m: int, p: int) -> tuple[int, int]:
    return (m - 1) // 2, ((1 << p) - 1 - m) // 2


def nth_closest_dyadic(d: Dyadic, p: int, i: int) -> Dyadic:
    """The i-th element (1-based) of D_p ordered by distance to ``d``.

    Equidistant pairs put the smaller value first.
    """
    if d.exponent != p or d.numerator % 2 == 0:
        raise DyadicError(f"{d} is not in D_{p}")
    if i < 1 or i > (1 << (p - 1)):
        raise DyadicError(f"index {i} outside 1..2^{p - 1}")
    m = d.numerator
    if i == 1:
        return d
    left, right = _side_counts(m, p)
    both = min(left, right)
    j = i - 1  # rank among the other elements
    if j <= 2 * both:
        step = (j + 1) // 2
        off = -2 * step if j % 2 == 1 else 2 * step
    else:
        step = j - both
        off = -2 * step if left > right else 2 * step
    return Dyadic(m + off, p)


def closest_dyadics(d: Dyadic, p: int, count: int) -> list[Dyadic]:
    return [nth_closest_dyadic(d, p, i) for i in range(1, count + 1)]


# -- serialization --------------------------------------------------------

def parse(text: str) -> Dyadic:
    """Inverse of ``str(d)``: ``"m/2^e"``."""
    try:
        num, den = text.strip().split("/2^")
        return normalize(int(num), int(den))
    except ValueError as exc:
        raise DyadicError(f"cannot parse dyadic {text!r}") from exc


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _read_varint(buf: bytes, pos: int) -> tuple[int, int]:
    n = shift = 0
    while True:
        if pos >= len(buf):
            raise DyadicError("truncated varint")
        byte = buf[pos]
        pos += 1
        n |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return n, pos


def to_bytes(d: Dyadic) -> bytes:
    """Compact form: varint exponent, then big-endian magnitude bytes."""
    if d.numerator < 0:
        raise DyadicError("only points serialize")
    mag = d.numerator.to_bytes((d.numerator.bit_length() + 7) // 8, "big")
    return _varint(d.exponent) + mag


def from_bytes(buf: bytes) -> Dyadic:
    e, pos = _read_varint(buf, 0)
    return normalize(int.from_bytes(buf[pos:], "big"), e)


def write_framed(d: Dyadic) -> bytes:
    """Length-prefixed :func:`to_bytes`, for streams of many values."""
    body = to_bytes(d)
    return _varint(len(body)) + body


def read_framed(buf: bytes, pos: int) -> tuple[Dyadic, int]:
    n, pos = _read_varint(buf, pos)
    return from_bytes(buf[pos:pos + n]), pos + n
