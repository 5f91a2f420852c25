"""Seeded input processes with exact points and exact labels.

Adversarial processes
---------------------
Both adversarial processes are organised in blocks.  Block ``k`` starts at
time ``n_k``, draws an anchor ``D_k`` uniformly from the order-``p_k``
dyadics and an offset point ``U_k`` with ``q_k = p_k + u_guard`` random
bits, and then emits points

    D_k + (U_k - D_k) / 2**(n_k + 2 i)

that close in on the anchor geometrically.  The 1NN process emits the
anchor alone first; the kNN process first emits the ``d_k + 1`` order-``p_k``
dyadics closest to ``D_k``.  Anchors and planted points carry label 1 under
the dyadic-indicator target and perturbed points label 0, assigned from the
provenance tag (the finite-precision point is itself dyadic; the label is
that of the idealised continuous point it stands in for).

Randomness for block ``k`` comes from streams keyed ``(seed, ("D", k))`` and
``(seed, ("U", k))`` only, so any block can be regenerated on its own.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from typing import Iterator, NamedTuple, Sequence

from . import dyadic as dy
from .dyadic import Dyadic, PrecisionError, add, nth_closest_dyadic, shift_right, sub
from .learners import KnnSchedule
from .rng import SeededStream, uniform_dyadic_bits, uniform_dyadic_order
from .spaces import IndicatorDyadics, Provenance, TargetFunction

__all__ = [
    "ScheduleParams",
    "ScheduleError",
    "LabeledSample",
    "Trajectory",
    "BlockInfo",
    "perturbed_point",
    "gen_1nn_adversarial",
    "gen_knn_adversarial",
    "gen_iid_uniform",
    "gen_enumerated_fresh",
    "gen_finite_support",
    "enumerated_point",
    "make_trajectory",
    "GENERATORS",
]


class ScheduleError(ValueError):
    pass


class TruncatedBlockWarning(UserWarning):
    pass


@lru_cache(maxsize=None)
def _n_1nn(k: int) -> int:
    return math.floor(k * (1 + math.log(k)))


@lru_cache(maxsize=None)
def _n_knn_exact(k: int, eps: float) -> int:
    return math.floor(math.exp(k ** (0.5 - eps)))


@dataclass(frozen=True)
class ScheduleParams:
    """Block schedule of an adversarial process.

    ``process`` is ``"1nn"`` or ``"knn"``; ``preset`` is ``"desk"`` or
    ``"exact"``.  ``guard`` is the slack in ``p_k >= 2 n_{k+1} + k +
    guard`` (``None`` skips that check); ``u_guard`` is the number of extra
    random bits of ``U_k`` beyond ``p_k``.
    """

    process: str = "1nn"
    preset: str = "desk"
    horizon: int = 20000
    epsilon: float = 0.05
    delta: float = 1.0
    guard: int | None = 16
    u_guard: int = 64

    def __post_init__(self):
        if self.process not in ("1nn", "knn"):
            raise ScheduleError(f"unknown process {self.process!r}")
        if self.preset not in ("desk", "exact"):
            raise ScheduleError(f"unknown preset {self.preset!r}")
        if self.horizon < 1:
            raise ScheduleError("horizon must be >= 1")

    @classmethod
    def for_preset(cls, process: str, preset: str = "desk", horizon: int = 20000, **kw):
        if preset == "exact":
            kw.setdefault("guard", None)
        return cls(process=process, preset=preset, horizon=horizon, **kw)

    # -- schedules ------------------------------------------------------
    def n(self, k: int) -> int:
        if self.process == "1nn":
            return _n_1nn(k)
        if self.preset == "desk":
            return k * k
        return _n_knn_exact(k, self.epsilon)

    def p(self, k: int) -> int:
        if self.preset == "desk":
            return 2 * self.n(k + 1) + k + 16
        if self.process == "1nn":
            return max(k * k, self.n(k) + 1)
        return 4 ** k

    def d(self, k: int) -> int:
        if self.process != "knn":
            return 0
        if self.preset == "desk":
            return math.ceil(4 * math.log2(k + 2))
        nk = self.n(k)
        base = math.floor(nk / math.log(nk) ** (1 + self.delta)) if nk > 1 else 0
        return max(0, min(base, self.n(k + 1) - nk - 1))

    def q(self, k: int) -> int:
        return self.p(k) + self.u_guard

    def block_length(self, k: int) -> int:
        return self.n(k + 1) - self.n(k)

    def truncated(self, k: int) -> bool:
        return self.process == "knn" and self.block_length(k) - self.d(k) - 1 <= 0

    def blocks(self) -> list[int]:
        """Indices of every block that starts within the horizon."""
        out, k = [], 1
        while self.n(k) <= self.horizon:
            out.append(k)
            k += 1
        return out

    def max_exponent(self, k: int) -> int:
        last = min(self.block_length(k), self.horizon - self.n(k) + 1) - 1
        if self.process == "knn":
            last -= self.d(k)
        return self.q(k) + self.n(k) + 2 * max(last, 0)

    def validate(self, knn_schedule: KnnSchedule | None = None) -> list[int]:
        """Check the standing conditions on every block; return truncated blocks."""
        if self.process == "knn" and self.preset == "exact":
            # exact rationals: in floats (1.2)/(0.8) slips just under 1.5
            eps, delta = Fraction(str(self.epsilon)), Fraction(str(self.delta))
            if not (0 < eps < Fraction(1, 2)
                    and (1 + 2 * eps) / (1 - 2 * eps) < 1 + delta / 2):
                raise ScheduleError(
                    f"epsilon={self.epsilon}, delta={self.delta} violate (1+2e)/(1-2e) < 1+delta/2")
        if self.n(1) < 1:
            raise ScheduleError("n_1 must be >= 1")
        cap = dy.get_precision_cap()
        truncated = []
        for k in self.blocks():
            nk, nk1, pk = self.n(k), self.n(k + 1), self.p(k)
            if nk1 <= nk:
                raise ScheduleError(f"n_k not increasing at k={k}: {nk} -> {nk1}")
            if pk <= nk:
                raise ScheduleError(f"p_k={pk} <= n_k={nk} at k={k}")
            if self.guard is not None and pk < 2 * nk1 + k + self.guard:
                raise ScheduleError(f"p_k={pk} < 2 n_(k+1) + k + {self.guard} at k={k}")
            if self.process == "knn":
                dk = self.d(k)
                if dk < 0:
                    raise ScheduleError(f"d_k < 0 at k={k}")
                if self.truncated(k):
                    truncated.append(k)
                else:
                    if not dk < nk1 - nk:
                        raise ScheduleError(f"d_k={dk} >= block length at k={k}")
                    if knn_schedule is not None:
                        kmax = max(knn_schedule(n) for n in range(nk + dk + 1, nk1))
                        if kmax > dk:
                            raise ScheduleError(f"k_n={kmax} exceeds d_k={dk} in block {k}")
            if self.max_exponent(k) > cap:
                raise PrecisionError(
                    f"block {k} needs {self.max_exponent(k)} bits, over the cap of {cap}")
        return truncated

    def to_dict(self) -> dict:
        return {"process": self.process, "preset": self.preset, "horizon": self.horizon,
                "epsilon": self.epsilon, "delta": self.delta, "guard": self.guard,
                "u_guard": self.u_guard}


class LabeledSample(NamedTuple):
    t: int
    x: Dyadic
    y: int
    provenance: str
    block: int | None = None


class BlockInfo(NamedTuple):
    k: int
    start: int
    anchor: Dyadic
    offset: Dyadic
    planted: int


@dataclass
class Trajectory:
    samples: list
    generator: str
    seed: int
    params: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def points(self) -> list[Dyadic]:
        return [s.x for s in self.samples]

    @property
    def labels(self) -> list[int]:
        return [s.y for s in self.samples]

    def head(self, horizon: int) -> "Trajectory":
        return Trajectory(self.samples[:horizon], self.generator, self.seed,
                          dict(self.params), [b for b in self.blocks if b.start <= horizon])

    # -- export ------------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "y", "provenance"])
        for s in self.samples:
            w.writerow([s.t, str(s.x), s.y, s.provenance])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, generator="csv", seed=0) -> "Trajectory":
        rows = list(csv.DictReader(io.StringIO(text)))
        samples = [LabeledSample(int(r["t"]), dy.parse(r["x"]), int(r["y"]), r["provenance"])
                   for r in rows]
        return cls(samples, generator, seed)

    def to_bytes(self) -> bytes:
        header = json.dumps({"generator": self.generator, "seed": self.seed,
                             "params": self.params}, sort_keys=True).encode()
        out = bytearray(_MAGIC)
        out += dy._varint(len(header)) + header + dy._varint(len(self.samples))
        for s in self.samples:
            out += dy._varint(s.t) + dy.write_framed(s.x) + dy._varint(s.y)
            out.append(Provenance.ALL.index(s.provenance))
        return bytes(out)

    @classmethod
    def from_bytes(cls, buf: bytes) -> "Trajectory":
        if not buf.startswith(_MAGIC):
            raise ValueError("not a trajectory cache")
        pos = len(_MAGIC)
        n, pos = dy._read_varint(buf, pos)
        meta = json.loads(buf[pos:pos + n])
        pos += n
        count, pos = dy._read_varint(buf, pos)
        samples = []
        for _ in range(count):
            t, pos = dy._read_varint(buf, pos)
            x, pos = dy.read_framed(buf, pos)
            y, pos = dy._read_varint(buf, pos)
            prov = Provenance.ALL[buf[pos]]
            pos += 1
            samples.append(LabeledSample(t, x, y, prov))
        return cls(samples, meta["generator"], meta["seed"], meta["params"])


_MAGIC = b"CNNTRAJ1"


def perturbed_point(anchor: Dyadic, offset: Dyadic, n_k: int, i: int) -> Dyadic:
    """``anchor + (offset - anchor) / (2**n_k * 4**i)``."""
    return add(anchor, shift_right(sub(offset, anchor), n_k + 2 * i))


def _label(target: TargetFunction, x: Dyadic, prov: str) -> int:
    return target(x, prov)


def _iter_adversarial(seed: int, params: ScheduleParams, target: TargetFunction,
                      blocks_out: list) -> Iterator[LabeledSample]:
    T = params.horizon
    t = 1
    n1 = params.n(1)
    if n1 > 1:
        # times before the first block are filled with iid points
        s = SeededStream(seed, ("prefix",))
        while t < n1 and t <= T:
            x = uniform_dyadic_bits(s, 64)
            yield LabeledSample(t, x, _label(target, x, Provenance.IID), Provenance.IID)
            t += 1
    for k in params.blocks():
        nk = params.n(k)
        length = params.block_length(k)
        pk = params.p(k)
        anchor = uniform_dyadic_order(SeededStream(seed, ("D", k)), pk)
        offset = uniform_dyadic_bits(SeededStream(seed, ("U", k)), params.q(k))
        planted = 1
        if params.process == "knn":
            planted = min(params.d(k) + 1, length)
            if params.truncated(k):
                warnings.warn(f"block {k} truncated to {planted} planted points",
                              TruncatedBlockWarning, stacklevel=3)
        blocks_out.append(BlockInfo(k, nk, anchor, offset, planted))
        for i in range(planted):
            if t > T:
                return
            x = anchor if params.process == "1nn" else nth_closest_dyadic(anchor, pk, i + 1)
            prov = Provenance.ANCHOR if i == 0 else Provenance.PLANTED
            yield LabeledSample(t, x, _label(target, x, prov), prov, k)
            t += 1
        for j in range(1, length - planted + 1):
            if t > T:
                return
            x = perturbed_point(anchor, offset, nk, j)
            yield LabeledSample(t, x, _label(target, x, Provenance.PERTURBED),
                                Provenance.PERTURBED, k)
            t += 1


def _adversarial(name, seed, params, target, knn_schedule=None):
    params.validate(knn_schedule)
    blocks: list = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncatedBlockWarning)
        samples = list(_iter_adversarial(seed, params, target, blocks))
    return Trajectory(samples, name, seed, params.to_dict(), blocks)


def gen_1nn_adversarial(seed: int, params: ScheduleParams | None = None,
                        target: TargetFunction | None = None) -> Trajectory:
    params = params or ScheduleParams.for_preset("1nn")
    if params.process != "1nn":
        raise ScheduleError("expected a 1nn schedule")
    return _adversarial("1nn_adversarial", seed, params, target or IndicatorDyadics())


def gen_knn_adversarial(seed: int, params: ScheduleParams | None = None,
                        target: TargetFunction | None = None,
                        knn_schedule: KnnSchedule | None = KnnSchedule("floor_log2")) -> Trajectory:
    params = params or ScheduleParams.for_preset("knn")
    if params.process != "knn":
        raise ScheduleError("expected a knn schedule")
    return _adversarial("knn_adversarial", seed, params, target or IndicatorDyadics(), knn_schedule)


def iter_adversarial(seed: int, params: ScheduleParams,
                     target: TargetFunction | None = None) -> Iterator[LabeledSample]:
    """Lazy variant of the adversarial generators (warns on truncated blocks)."""
    params.validate()
    return _iter_adversarial(seed, params, target or IndicatorDyadics(), [])


def gen_iid_uniform(seed: int, horizon: int, q: int = 64,
                    target: TargetFunction | None = None) -> Trajectory:
    if q < 1:
        raise ValueError("q must be >= 1")
    target = target or IndicatorDyadics()
    s = SeededStream(seed, ("iid",))
    samples = []
    for t in range(1, horizon + 1):
        x = uniform_dyadic_bits(s, q)
        samples.append(LabeledSample(t, x, _label(target, x, Provenance.IID), Provenance.IID))
    return Trajectory(samples, "iid_uniform", seed, {"horizon": horizon, "q": q})


def enumerated_point(t: int) -> Dyadic:
    """The t-th dyadic in the order 1/2, 1/4, 3/4, 1/8, 3/8, ..."""
    p = t.bit_length()
    return Dyadic(2 * (t - (1 << (p - 1))) + 1, p)


def gen_enumerated_fresh(horizon: int, target: TargetFunction | None = None,
                         seed: int = 0) -> Trajectory:
    target = target or IndicatorDyadics()
    samples = []
    for t in range(1, horizon + 1):
        x = enumerated_point(t)
        samples.append(LabeledSample(t, x, _label(target, x, Provenance.ENUMERATED),
                                     Provenance.ENUMERATED))
    return Trajectory(samples, "enumerated_fresh", seed, {"horizon": horizon})


def gen_finite_support(seed: int, support: Sequence[Dyadic], horizon: int,
                       target: TargetFunction | None = None) -> Trajectory:
    if not support:
        raise ValueError("support must be non-empty")
    target = target or IndicatorDyadics()
    s = SeededStream(seed, ("support",))
    samples = []
    for t in range(1, horizon + 1):
        x = support[s.below(len(support))]
        samples.append(LabeledSample(t, x, _label(target, x, Provenance.SUPPORT),
                                     Provenance.SUPPORT))
    return Trajectory(samples, "finite_support", seed,
                      {"horizon": horizon, "support": [str(x) for x in support]})


GENERATORS = ("1nn_adversarial", "knn_adversarial", "iid_uniform", "enumerated_fresh",
              "finite_support")


def make_trajectory(spec: dict, seed: int, target: TargetFunction | None = None) -> Trajectory:
    """Build a trajectory from a plain-data process spec.

    ``spec`` holds ``generator`` plus generator parameters, e.g.
    ``{"generator": "1nn_adversarial", "preset": "desk", "horizon": 20000}``.
    """
    gen = spec["generator"]
    horizon = int(spec["horizon"])
    if gen in ("1nn_adversarial", "knn_adversarial"):
        process = gen.split("_")[0]
        kw = {key: spec[key] for key in ("epsilon", "delta", "guard", "u_guard") if key in spec}
        params = ScheduleParams.for_preset(process, spec.get("preset", "desk"), horizon, **kw)
        if process == "1nn":
            return gen_1nn_adversarial(seed, params, target)
        sched = spec.get("knn_schedule", "floor_log2")
        return gen_knn_adversarial(seed, params, target,
                                   KnnSchedule(sched) if sched else None)
    if gen == "iid_uniform":
        return gen_iid_uniform(seed, horizon, int(spec.get("q", 64)), target)
    if gen == "enumerated_fresh":
        return gen_enumerated_fresh(horizon, target, seed)
    if gen == "finite_support":
        support = spec.get("support", ["1/2^2", "3/2^2"])
        if isinstance(support, str):
            support = [s for s in support.replace(",", " ").split()]
        return gen_finite_support(seed, [dy.parse(s) for s in support], horizon, target)
    raise ValueError(f"unknown generator {gen!r}")


def take(it: Iterator, n: int) -> list:
    return list(islice(it, n))
