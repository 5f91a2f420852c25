"""Online learning rules on [0, 1].

All rules share one two-phase interface so that a label can never reach a
learner before its prediction is fixed::

    y_hat = learner.predict(x_t)
    learner.reveal(y_t)

``step(x, y)`` is the same thing in one call.

Rules
-----
``memo``    memorization: repeat the label of an identical past input, else
            the default label.
``kc1nn``   capped 1-nearest-neighbour.  Duplicate inputs are answered by
            memorization and never enter the dataset; otherwise the nearest
            dataset point (ties to the smallest time) is the representant,
            its child counter is incremented and it is dropped from the
            dataset once the counter reaches ``k``.
``1nn``     ``kc1nn`` with an infinite cap.
``knn``     majority vote over the ``k_t`` nearest past inputs (ties in
            distance to the smallest time, ties in the vote to the smallest
            label), nothing is ever deleted.

The dataset is kept as a sorted list of exact points, so the nearest
neighbour of a new input is one of the two keys adjacent to its insertion
position.
"""
from __future__ import annotations

import bisect
import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .dyadic import Dyadic, abs_diff

__all__ = [
    "LearnerState",
    "KnnSchedule",
    "PredictionTree",
    "Learner",
    "Memorization",
    "CappedNearestNeighbor",
    "KNearestNeighbors",
    "LearnerConfig",
    "make_learner",
    "snapshot_tree",
    "RULES",
]

RULES = ("memo", "1nn", "knn", "kc1nn")


class LearnerError(RuntimeError):
    pass


@dataclass
class LearnerState:
    """Everything a rule remembers.  ``t`` counts completed steps."""

    rule: str
    cap_k: float = math.inf
    default_label: int = 0
    t: int = 0
    dataset: set = field(default_factory=set)
    points_by_time: dict = field(default_factory=dict)
    child_count: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)
    seen_points: dict = field(default_factory=dict)
    deletions: list = field(default_factory=list)

    def canonical(self) -> dict:
        """Plain-data view used for exact state comparison."""
        return {
            "t": self.t,
            "dataset": sorted(self.dataset),
            "points": {u: ((x.numerator, x.exponent), y)
                       for u, (x, y) in self.points_by_time.items()},
            "child_count": dict(sorted(self.child_count.items())),
            "parent": dict(sorted(self.parent.items())),
            "seen": sorted(((x.numerator, x.exponent), u) for x, u in self.seen_points.items()),
            "deletions": list(self.deletions),
        }


@dataclass(frozen=True)
class KnnSchedule:
    """The neighbour count k_n; always at least 1."""

    rule: str = "floor_log2"
    k: int = 1
    table: Mapping[int, int] | Callable[[int], int] | None = None

    def __call__(self, n: int) -> int:
        if self.rule == "constant":
            v = self.k
        elif self.rule == "floor_log2":
            v = n.bit_length() - 1
        elif self.rule == "floor_sqrt":
            v = math.isqrt(n)
        elif self.rule == "custom":
            v = self.table(n) if callable(self.table) else self.table[n]
        else:
            raise ValueError(f"unknown schedule {self.rule!r}")
        return max(1, int(v))

    def describe(self) -> str:
        return f"constant({self.k})" if self.rule == "constant" else self.rule


@dataclass
class PredictionTree:
    nodes: list
    parent: dict
    children: dict
    deleted: set
    roots: list

    def depth(self) -> dict:
        out = {}
        for u in self.nodes:
            if u in out:
                continue
            chain = []
            v = u
            while v not in out and v in self.parent:
                chain.append(v)
                v = self.parent[v]
            d = out.get(v, 0)
            if v not in out:
                out[v] = 0
            for w in reversed(chain):
                d += 1
                out[w] = d
        return out

    def ancestors(self, u) -> list:
        """``[u, parent(u), ..., root]``."""
        chain = [u]
        while chain[-1] in self.parent:
            chain.append(self.parent[chain[-1]])
        return chain


def snapshot_tree(state: LearnerState) -> PredictionTree:
    nodes = sorted(state.child_count)
    children = {u: [] for u in nodes}
    for v, u in sorted(state.parent.items()):
        children[u].append(v)
    deleted = {u for u, _ in state.deletions}
    roots = [u for u in nodes if u not in state.parent]
    return PredictionTree(nodes, dict(state.parent), children, deleted, roots)


class Learner:
    rule = "base"

    def __init__(self, default_label: int = 0):
        self.state = LearnerState(rule=self.rule, default_label=default_label)
        self._pending = None

    @property
    def t(self) -> int:
        return self.state.t

    def predict(self, x: Dyadic) -> int:
        if self._pending is not None:
            raise LearnerError("predict called twice without reveal")
        y_hat, plan = self._predict(x)
        self._pending = (x, y_hat, plan)
        return y_hat

    def reveal(self, y: int) -> None:
        if self._pending is None:
            raise LearnerError("reveal called before predict")
        x, _, plan = self._pending
        self._pending = None
        s = self.state
        s.t += 1
        t = s.t
        s.points_by_time[t] = (x, y)
        self._update(t, x, y, plan)

    def step(self, x: Dyadic, y: int) -> int:
        y_hat = self.predict(x)
        self.reveal(y)
        return y_hat

    def _predict(self, x):
        raise NotImplementedError

    def _update(self, t, x, y, plan):
        raise NotImplementedError

    def tree(self) -> PredictionTree:
        return snapshot_tree(self.state)


class Memorization(Learner):
    rule = "memo"

    def _predict(self, x):
        s = self.state
        u = s.seen_points.get(x)
        return (s.default_label if u is None else s.points_by_time[u][1]), None

    def _update(self, t, x, y, plan):
        s = self.state
        if x not in s.seen_points:
            s.seen_points[x] = t
            s.dataset.add(t)


class CappedNearestNeighbor(Learner):
    """kC1NN; ``cap_k=math.inf`` gives plain 1NN."""

    def __init__(self, cap_k: float = 2, default_label: int = 0, tie_break: str = "min_time"):
        if not cap_k >= 1:
            raise ValueError("cap_k must be >= 1")
        self.rule = "1nn" if cap_k == math.inf else "kc1nn"
        super().__init__(default_label)
        self.state.cap_k = cap_k
        # tie_break="max_time" deliberately breaks equivalence with the
        # reference; it exists for negative-control tests only
        self._tie_min = tie_break == "min_time"
        self._keys: list[Dyadic] = []
        self._times: list[int] = []

    def _nearest(self, x: Dyadic) -> int:
        keys = self._keys
        i = bisect.bisect_left(keys, x)
        if i == 0:
            return 0
        if i == len(keys):
            return i - 1
        lo, hi = keys[i - 1], keys[i]
        # 2x vs lo + hi decides which side is closer
        e = max(x.exponent, lo.exponent, hi.exponent) + 1
        two_x = x.numerator << (e - x.exponent + 1)
        both = (lo.numerator << (e - lo.exponent)) + (hi.numerator << (e - hi.exponent))
        if two_x < both:
            return i - 1
        if two_x > both:
            return i
        a, b = self._times[i - 1], self._times[i]
        if (a < b) == self._tie_min:
            return i - 1
        return i

    def _predict(self, x):
        s = self.state
        u = s.seen_points.get(x)
        if u is not None:
            return s.points_by_time[u][1], ("dup", None)
        if not self._keys:
            return s.default_label, ("new", None)
        j = self._nearest(x)
        phi = self._times[j]
        return s.points_by_time[phi][1], ("new", (j, phi))

    def _update(self, t, x, y, plan):
        s = self.state
        kind, nn = plan
        if kind == "dup":
            return
        s.seen_points[x] = t
        s.child_count[t] = 0
        if nn is not None:
            j, phi = nn
            s.parent[t] = phi
            s.child_count[phi] += 1
            if s.child_count[phi] >= s.cap_k:
                s.dataset.discard(phi)
                del self._keys[j]
                del self._times[j]
                s.deletions.append((phi, t))
        s.dataset.add(t)
        i = bisect.bisect_left(self._keys, x)
        self._keys.insert(i, x)
        self._times.insert(i, t)


def _walk(keys, times_at, x, indices):
    for i in indices:
        d = abs_diff(keys[i], x)
        for u in times_at[i]:
            yield d, u


class KNearestNeighbors(Learner):
    """(k_n)-NN over every past input, duplicates included."""

    rule = "knn"

    def __init__(self, schedule: KnnSchedule | None = None, default_label: int = 0):
        super().__init__(default_label)
        self.schedule = schedule or KnnSchedule()
        self._keys: list[Dyadic] = []
        self._times_at: list[list[int]] = []

    def neighbors(self, x: Dyadic, k: int) -> list[int]:
        keys = self._keys
        i = bisect.bisect_left(keys, x)
        left = _walk(keys, self._times_at, x, range(i - 1, -1, -1))
        right = _walk(keys, self._times_at, x, range(i, len(keys)))
        out = []
        for _, u in heapq.merge(left, right):
            out.append(u)
            if len(out) == k:
                break
        return out

    def _predict(self, x):
        s = self.state
        if not self._keys:
            return s.default_label, None
        k = self.schedule(s.t + 1)
        votes = Counter(s.points_by_time[u][1] for u in self.neighbors(x, k))
        best = max(votes.values())
        return min(lab for lab, c in votes.items() if c == best), None

    def _update(self, t, x, y, plan):
        s = self.state
        s.dataset.add(t)
        s.seen_points.setdefault(x, t)
        keys = self._keys
        i = bisect.bisect_left(keys, x)
        if i < len(keys) and keys[i] == x:
            self._times_at[i].append(t)
        else:
            keys.insert(i, x)
            self._times_at.insert(i, [t])


@dataclass(frozen=True)
class LearnerConfig:
    """Declarative learner choice: ``rule`` in :data:`RULES`."""

    rule: str = "kc1nn"
    k: int = 2
    schedule: str = "floor_log2"
    default_label: int = 0

    @property
    def name(self) -> str:
        if self.rule == "kc1nn":
            return f"{self.k}c1nn"
        if self.rule == "knn":
            return f"knn[{self.schedule if self.schedule != 'constant' else self.k}]"
        return self.rule

    def build(self) -> Learner:
        return make_learner(self.rule, k=self.k, schedule=self.schedule,
                            default_label=self.default_label)

    def to_dict(self) -> dict:
        return {"rule": self.rule, "k": self.k, "schedule": self.schedule,
                "default_label": self.default_label}

    @classmethod
    def parse(cls, text: str) -> "LearnerConfig":
        """``"2c1nn"``, ``"1nn"``, ``"memo"``, ``"knn"``, ``"knn:floor_sqrt"``, ``"knn:5"``."""
        text = text.strip().lower()
        if text.endswith("c1nn") and text[:-4].isdigit():
            return cls("kc1nn", k=int(text[:-4]))
        if text in ("1nn", "memo"):
            return cls(text)
        if text.startswith("knn"):
            _, _, arg = text.partition(":")
            if not arg:
                return cls("knn")
            if arg.isdigit():
                return cls("knn", k=int(arg), schedule="constant")
            return cls("knn", schedule=arg)
        if text == "kc1nn":
            return cls("kc1nn")
        raise ValueError(f"unknown learner {text!r}")


def make_learner(rule: str, k: int = 2, schedule: str | KnnSchedule = "floor_log2",
                 default_label: int = 0) -> Learner:
    if rule == "memo":
        return Memorization(default_label)
    if rule == "1nn":
        return CappedNearestNeighbor(math.inf, default_label)
    if rule == "kc1nn":
        if k < 1:
            raise ValueError("cap k must be >= 1")
        return CappedNearestNeighbor(k, default_label)
    if rule == "knn":
        if not isinstance(schedule, KnnSchedule):
            schedule = KnnSchedule("constant", k=k) if schedule == "constant" else KnnSchedule(schedule)
        return KNearestNeighbors(schedule, default_label)
    raise ValueError(f"unknown rule {rule!r}")
