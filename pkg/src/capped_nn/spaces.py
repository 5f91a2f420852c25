"""Instance space [0, 1], label spaces with 0-1 loss, and target functions.

Labels are plain non-negative ints.  Targets are small frozen dataclasses
evaluated exactly on :class:`~capped_nn.dyadic.Dyadic` points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .dyadic import Dyadic, Order, abs_diff, compare, parse

__all__ = [
    "Provenance",
    "LossSpec",
    "ZERO_ONE",
    "loss",
    "TargetFunction",
    "IndicatorDyadics",
    "IndicatorIntervalBelow",
    "IndicatorBall",
    "Constant",
    "CustomTable",
    "eval_target",
    "target_from_spec",
]

Label = int


class Provenance:
    """How a sample point came to be (string constants)."""

    ANCHOR = "anchor_dyadic"
    PLANTED = "planted_neighbor"
    PERTURBED = "perturbed"
    IID = "iid"
    ENUMERATED = "enumerated"
    SUPPORT = "support"

    ALL = (ANCHOR, PLANTED, PERTURBED, IID, ENUMERATED, SUPPORT)
    # the idealised point is a continuous random variable, a.s. not dyadic
    CONTINUOUS = frozenset({PERTURBED, IID})


@dataclass(frozen=True)
class LossSpec:
    kind: str = "zero-one"
    c_ell: float = 1.0
    sup_loss: float = 1.0


ZERO_ONE = LossSpec()


def loss(y_hat: Label, y: Label) -> int:
    return 0 if y_hat == y else 1


class TargetFunction:
    name = "target"

    def __call__(self, x: Dyadic, provenance: str | None = None) -> Label:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IndicatorDyadics(TargetFunction):
    """1 on the dyadic rationals.

    Every finite-precision point is technically dyadic, so membership is
    read off the provenance tag: points standing in for continuous draws
    (perturbed, iid) are labelled 0, everything else 1.
    """

    name = "indicator_dyadics"

    def __call__(self, x, provenance=None):
        return 0 if provenance in Provenance.CONTINUOUS else 1

    def to_spec(self):
        return {"name": self.name}


@dataclass(frozen=True)
class IndicatorIntervalBelow(TargetFunction):
    """1 on [0, s) (or [0, s] when ``closed``)."""

    s: Dyadic
    closed: bool = False
    name = "indicator_interval_below"

    def __call__(self, x, provenance=None):
        c = compare(x, self.s)
        return int(c is Order.LESS or (self.closed and c is Order.EQUAL))

    def to_spec(self):
        return {"name": self.name, "s": str(self.s), "closed": self.closed}


@dataclass(frozen=True)
class IndicatorBall(TargetFunction):
    """1 on the open ball |x - center| < radius (closed ball when ``closed``)."""

    center: Dyadic
    radius: Dyadic
    closed: bool = False
    name = "indicator_ball"

    def __call__(self, x, provenance=None):
        c = compare(abs_diff(x, self.center), self.radius)
        return int(c is Order.LESS or (self.closed and c is Order.EQUAL))

    def to_spec(self):
        return {"name": self.name, "center": str(self.center),
                "radius": str(self.radius), "closed": self.closed}


@dataclass(frozen=True)
class Constant(TargetFunction):
    label: Label = 0
    name = "constant"

    def __call__(self, x, provenance=None):
        return self.label

    def to_spec(self):
        return {"name": self.name, "label": self.label}


@dataclass(frozen=True)
class CustomTable(TargetFunction):
    table: Mapping[Dyadic, Label] = field(default_factory=dict)
    name = "custom_table"

    def __call__(self, x, provenance=None):
        try:
            return self.table[x]
        except KeyError:
            raise KeyError(f"custom target has no entry for {x}") from None

    def __hash__(self):
        return hash(tuple(sorted((str(k), v) for k, v in self.table.items())))

    def to_spec(self):
        return {"name": self.name, "table": {str(k): v for k, v in self.table.items()}}


def eval_target(f: TargetFunction, x: Dyadic, provenance: str | None = None) -> Label:
    return f(x, provenance)


def target_from_spec(spec: Mapping | str) -> TargetFunction:
    """Build a target from ``{"name": ..., params}`` or a bare name."""
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec["name"]

    def dy(key, default=None):
        v = spec.get(key, default)
        return parse(v) if isinstance(v, str) else v

    def flag(key):
        v = spec.get(key, False)
        return v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes")

    if name in ("indicator_dyadics", "dyadics"):
        return IndicatorDyadics()
    if name in ("indicator_interval_below", "interval"):
        return IndicatorIntervalBelow(dy("s", "1/2^1"), flag("closed"))
    if name in ("indicator_ball", "ball"):
        return IndicatorBall(dy("center"), dy("radius"), flag("closed"))
    if name == "constant":
        return Constant(int(spec.get("label", 0)))
    if name == "custom_table":
        return CustomTable({parse(k): int(v) for k, v in spec["table"].items()})
    raise ValueError(f"unknown target {name!r}")
