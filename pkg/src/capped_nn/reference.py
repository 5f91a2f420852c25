"""Naive recomputation of every rule, used as a test oracle.

Points are rescaled once to integers over a common power of two and every
argmin is a linear scan over plain ints, so nothing here touches the sorted
index, the float filter or Dyadic comparisons used by :mod:`learners`.
"""
from __future__ import annotations

import math
from collections import Counter

from .learners import KnnSchedule, LearnerConfig, LearnerState

__all__ = ["reference_trace", "reference_step"]


def _schedule(cfg: LearnerConfig) -> KnnSchedule:
    if cfg.schedule == "constant":
        return KnnSchedule("constant", k=cfg.k)
    return KnnSchedule(cfg.schedule)


def reference_trace(cfg: LearnerConfig, xs, ys):
    """Yield ``(prediction, state)`` after each step, replaying from t = 1.

    The yielded state is the same object each time; copy it (e.g. via
    ``canonical()``) before advancing the generator.
    """
    E = max((x.exponent for x in xs), default=0)
    ints = [x.numerator << (E - x.exponent) for x in xs]
    cap = math.inf if cfg.rule == "1nn" else cfg.k
    s = LearnerState(rule=cfg.rule if cfg.rule != "kc1nn" else "kc1nn",
                     cap_k=cap if cfg.rule in ("1nn", "kc1nn") else math.inf,
                     default_label=cfg.default_label)
    first = {}
    sched = _schedule(cfg) if cfg.rule == "knn" else None
    for idx, (x, y) in enumerate(zip(xs, ys)):
        t = idx + 1
        v = ints[idx]
        if cfg.rule == "memo":
            pred = ys[first[v] - 1] if v in first else cfg.default_label
            if v not in first:
                first[v] = t
                s.dataset.add(t)
                s.seen_points[x] = t
        elif cfg.rule == "knn":
            past = list(range(1, t))
            if not past:
                pred = cfg.default_label
            else:
                k = sched(t)
                near = sorted(past, key=lambda u: (abs(ints[u - 1] - v), u))[:k]
                votes = Counter(ys[u - 1] for u in near)
                best = max(votes.values())
                pred = min(lab for lab, c in votes.items() if c == best)
            s.dataset.add(t)
            if v not in first:
                first[v] = t
                s.seen_points[x] = t
        else:
            if v in first:
                pred = ys[first[v] - 1]
            else:
                first[v] = t
                s.seen_points[x] = t
                s.child_count[t] = 0
                if not s.dataset:
                    pred = cfg.default_label
                else:
                    phi = None
                    for u in sorted(s.dataset):
                        if phi is None or abs(ints[u - 1] - v) < abs(ints[phi - 1] - v):
                            phi = u
                    pred = ys[phi - 1]
                    s.parent[t] = phi
                    s.child_count[phi] += 1
                    if s.child_count[phi] == s.cap_k:
                        s.dataset.remove(phi)
                        s.deletions.append((phi, t))
                s.dataset.add(t)
        s.t = t
        s.points_by_time[t] = (x, y)
        yield pred, s


def reference_step(cfg: LearnerConfig, xs, ys):
    """Prediction and state for the last element of ``xs``, replayed from scratch."""
    if not xs:
        return cfg.default_label, None
    out = None
    for out in reference_trace(cfg, list(xs), list(ys)):
        pass
    return out
