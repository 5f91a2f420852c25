"""Learner-versus-process experiments.

A run feeds a trajectory to a learner one sample at a time, fixing each
prediction before the label is revealed, and records the cumulative number
of mistakes at a grid of checkpoints.  Average losses are exact fractions
until they are written out.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .dyadic import Dyadic, Order, compare
from .learners import LearnerConfig, PredictionTree, snapshot_tree
from .processes import Trajectory, make_trajectory
from .rng import SeededStream, derive_seed
from .spaces import TargetFunction, loss, target_from_spec

__all__ = [
    "RunReport",
    "AggregateReport",
    "default_checkpoints",
    "config_hash",
    "run_trajectory",
    "run_monte_carlo",
    "compare_learners",
    "Interval",
    "crf_frequency",
    "sample_path_pairs",
    "path_inequality_check",
    "tree_summary",
]


class HarnessError(ValueError):
    pass


def default_checkpoints(horizon: int, start: int = 256) -> list[int]:
    """Powers of two from ``start`` below ``horizon``, then ``horizon``."""
    out = []
    T = start
    while T < horizon:
        out.append(T)
        T *= 2
    out.append(horizon)
    return out


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def tree_summary(tree: PredictionTree) -> dict:
    depth = tree.depth()
    hist = Counter(depth.values())
    return {
        "nodes": len(tree.nodes),
        "max_child_count": max((len(c) for c in tree.children.values()), default=0),
        "deleted": len(tree.deleted),
        "depth_histogram": {str(d): hist[d] for d in sorted(hist)},
    }


@dataclass
class RunReport:
    learner: str
    checkpoints: list
    errors: list                 # cumulative mistakes at each checkpoint
    error_times: list
    dataset_size: list
    deletions: int
    tree: dict
    seed: int | None = None
    config_hash: str = ""

    @property
    def losses(self) -> list[Fraction]:
        return [Fraction(e, T) for e, T in zip(self.errors, self.checkpoints)]

    @property
    def avg_loss(self) -> list[float]:
        return [float(x) for x in self.losses]

    def replayed_errors(self) -> list[int]:
        """Cumulative mistakes recomputed from ``error_times``."""
        out, i = [], 0
        for T in self.checkpoints:
            while i < len(self.error_times) and self.error_times[i] <= T:
                i += 1
            out.append(i)
        return out

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "checkpoints": self.checkpoints,
            "errors": self.errors,
            "avg_loss": [round(v, 12) for v in self.avg_loss],
            "dataset_size": self.dataset_size,
            "deletions": self.deletions,
            "tree": self.tree,
        }


def run_trajectory(traj: Trajectory, target: TargetFunction | None,
                   learner: LearnerConfig, checkpoints: Sequence[int] | None = None,
                   *, seed: int | None = None, log: list | None = None,
                   keep_learner: bool = False):
    """Run one learner over ``traj``.

    With ``target=None`` the trajectory's own labels are used.  If ``log``
    is a list, ``("predict", t)`` / ``("reveal", t)`` events are appended.
    Returns a :class:`RunReport`, or ``(report, learner)`` with
    ``keep_learner``.
    """
    checkpoints = list(checkpoints or default_checkpoints(len(traj)))
    if checkpoints != sorted(checkpoints) or checkpoints[0] < 1:
        raise HarnessError("checkpoints must be positive and sorted")
    if checkpoints[-1] > len(traj):
        raise HarnessError(f"horizon {len(traj)} is shorter than checkpoint {checkpoints[-1]}")
    model = learner.build() if isinstance(learner, LearnerConfig) else learner
    name = learner.name if isinstance(learner, LearnerConfig) else model.rule
    errors, sizes, error_times = [], [], []
    mistakes = 0
    ci = 0
    for s in traj.samples[:checkpoints[-1]]:
        y_hat = model.predict(s.x)
        if log is not None:
            log.append(("predict", s.t))
        y = s.y if target is None else target(s.x, s.provenance)
        model.reveal(y)
        if log is not None:
            log.append(("reveal", s.t))
        if loss(y_hat, y):
            mistakes += 1
            error_times.append(s.t)
        while ci < len(checkpoints) and checkpoints[ci] == s.t:
            errors.append(mistakes)
            sizes.append(len(model.state.dataset))
            ci += 1
    report = RunReport(
        learner=name,
        checkpoints=checkpoints,
        errors=errors,
        error_times=error_times,
        dataset_size=sizes,
        deletions=len(model.state.deletions),
        tree=tree_summary(snapshot_tree(model.state)),
        seed=seed if seed is not None else traj.seed,
    )
    return (report, model) if keep_learner else report


@dataclass
class AggregateReport:
    learner: str
    checkpoints: list
    trial_losses: list           # trials x checkpoints, Fractions
    seeds: list
    config_hash: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.trial_losses)

    @property
    def mean_exact(self) -> list[Fraction]:
        n = len(self.trial_losses)
        return [sum(col, Fraction(0)) / n for col in zip(*self.trial_losses)]

    @property
    def mean_loss(self) -> list[float]:
        return [float(m) for m in self.mean_exact]

    def quantile(self, q: float) -> list[float]:
        arr = np.array([[float(v) for v in row] for row in self.trial_losses])
        return [float(v) for v in np.quantile(arr, q, axis=0)]

    @property
    def final_losses(self) -> list[float]:
        return [float(row[-1]) for row in self.trial_losses]

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "checkpoints": self.checkpoints,
            "mean_loss": [round(v, 12) for v in self.mean_loss],
            "q10": [round(v, 12) for v in self.quantile(0.1)],
            "q90": [round(v, 12) for v in self.quantile(0.9)],
            "final_losses": [round(v, 12) for v in self.final_losses],
            "seeds": self.seeds,
            "config_hash": self.config_hash,
        }


def _trial(args):
    process_spec, target_spec, learner_dicts, checkpoints, seed = args
    target = target_from_spec(target_spec) if target_spec else None
    traj = make_trajectory(process_spec, seed, target)
    out = []
    for ld in learner_dicts:
        r = run_trajectory(traj, None, LearnerConfig(**ld), checkpoints, seed=seed)
        out.append(r.losses)
    return out


def compare_learners(process_spec: dict, target: TargetFunction | dict | None,
                     learners: Sequence[LearnerConfig], trials: int, base_seed: int,
                     checkpoints: Sequence[int] | None = None,
                     workers: int = 1) -> dict[str, AggregateReport]:
    """Monte-Carlo runs of several learners on shared trajectories."""
    if trials < 1:
        raise HarnessError("trials must be >= 1")
    horizon = int(process_spec["horizon"])
    checkpoints = list(checkpoints or default_checkpoints(horizon))
    target_spec = target.to_spec() if isinstance(target, TargetFunction) else target
    seeds = [derive_seed(base_seed, "trial", i) for i in range(trials)]
    jobs = [(process_spec, target_spec, [lc.to_dict() for lc in learners], checkpoints, s)
            for s in seeds]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_trial, jobs))
    else:
        results = [_trial(j) for j in jobs]
    h = config_hash({"process": process_spec, "target": target_spec,
                     "learners": [lc.to_dict() for lc in learners],
                     "checkpoints": checkpoints, "trials": trials, "seed": base_seed})
    out = {}
    for li, lc in enumerate(learners):
        out[lc.name] = AggregateReport(lc.name, checkpoints, [r[li] for r in results],
                                       seeds, h)
    return out


def run_monte_carlo(process_spec: dict, target, learner: LearnerConfig, trials: int,
                    base_seed: int, checkpoints: Sequence[int] | None = None,
                    workers: int = 1) -> AggregateReport:
    return compare_learners(process_spec, target, [learner], trials, base_seed,
                            checkpoints, workers)[learner.name]


# -- convergent relative frequencies ------------------------------------------

class Interval(NamedTuple):
    lo: Dyadic
    hi: Dyadic
    lo_closed: bool = True
    hi_closed: bool = False

    def contains(self, x: Dyadic) -> bool:
        a = compare(self.lo, x)
        if a is Order.GREATER or (a is Order.EQUAL and not self.lo_closed):
            return False
        b = compare(x, self.hi)
        return b is Order.LESS or (b is Order.EQUAL and self.hi_closed)


def _check_intervals(intervals):
    if not intervals:
        raise HarnessError("empty interval list")
    for iv in intervals:
        if not isinstance(iv, Interval):
            raise HarnessError(f"not an Interval: {iv!r}")
        if not (iv.lo.is_point and iv.hi.is_point):
            raise HarnessError(f"interval {iv} leaves [0, 1]")
        if compare(iv.lo, iv.hi) is Order.GREATER:
            raise HarnessError(f"interval {iv} has lo > hi")


def crf_frequency(traj, intervals: Sequence[Interval],
                  checkpoints: Sequence[int]) -> list[tuple[int, float]]:
    """Fraction of the first T points in the union of ``intervals``."""
    _check_intervals(intervals)
    points = traj.points if hasattr(traj, "points") else list(traj)
    if checkpoints[-1] > len(points):
        raise HarnessError("checkpoint beyond trajectory horizon")
    out, hits, t = [], 0, 0
    for T in checkpoints:
        while t < T:
            x = points[t]
            hits += any(iv.contains(x) for iv in intervals)
            t += 1
        out.append((T, hits / T))
    return out


# -- path inequality on 2C1NN prediction trees ----------------------------------

def _final_dataset(tree: PredictionTree) -> list:
    return [u for u in tree.nodes if u not in tree.deleted]


def sample_path_pairs(tree: PredictionTree, count: int = 10_000, seed: int = 0,
                      max_attempts: int | None = None) -> list[tuple[list, list]]:
    """Seeded sample of node-disjoint downward path pairs.

    Each pair is ``(P, Q)`` with ``P = [p_0, ..., p_d]`` following parent
    links downward to a node still in the final dataset, likewise ``Q``,
    and ``p_0 < q_0``.
    """
    final = _final_dataset(tree)
    if len(final) < 2:
        return []
    rng = SeededStream(seed, ("path-pairs",))
    max_attempts = max_attempts or 20 * count
    chains: dict = {}

    def chain(u):
        c = chains.get(u)
        if c is None:
            c = chains[u] = tree.ancestors(u)
        return c

    pairs = []
    for _ in range(max_attempts):
        if len(pairs) >= count:
            break
        a = final[rng.below(len(final))]
        b = final[rng.below(len(final))]
        if a == b:
            continue
        A, B = chain(a), chain(b)
        Bset = set(B)
        ia = next((i for i, u in enumerate(A) if u in Bset), len(A))
        ib = B.index(A[ia]) if ia < len(A) else len(B)
        if ia == 0 or ib == 0:
            continue  # one endpoint is an ancestor of the other
        P = A[:rng.below(ia) + 1][::-1]
        Q = B[:rng.below(ib) + 1][::-1]
        if P[0] > Q[0]:
            P, Q = Q, P
        pairs.append((P, Q))
    return pairs


def _qualifies(tree, final, P, Q) -> bool:
    if not P or not Q or P[0] >= Q[0] or set(P) & set(Q):
        return False
    if P[-1] not in final or Q[-1] not in final:
        return False
    for path in (P, Q):
        for prev, cur in zip(path, path[1:]):
            if tree.parent.get(cur) != prev:
                return False
    return True


def _dist(x: Dyadic, y: Dyadic) -> tuple[int, int]:
    e = max(x.exponent, y.exponent)
    return abs((x.numerator << (e - x.exponent)) - (y.numerator << (e - y.exponent))), e


def _le(lhs: tuple[int, int], rhs: tuple[int, int], shift: int) -> bool:
    """lhs <= 2**shift * rhs for (numerator, exponent) pairs."""
    (a, ea), (b, eb) = lhs, rhs
    e = max(ea, eb)
    return a << (e - ea) <= (b << (e - eb)) << shift


def path_inequality_check(tree: PredictionTree, points, pairs) -> tuple[list, int]:
    """Check both path inequalities on every qualifying pair.

    For paths ``P = p_0..p_d`` and ``Q = q_0..q_f`` with ``v`` the last index
    with ``p_v < q_0``, both ``|x_{p_v} - x_{q_0}|`` and ``|x_{p_v} - x_{p_d}|``
    must be at most ``2**(f+d+1) * |x_{p_d} - x_{q_f}|``.

    ``points`` maps time to point.  Returns ``(violations, checked)``;
    pairs that do not meet the preconditions are skipped.
    """
    final = set(_final_dataset(tree))
    violations, checked = [], 0
    for P, Q in pairs:
        if not _qualifies(tree, final, P, Q):
            continue
        checked += 1
        d, f = len(P) - 1, len(Q) - 1
        v = max(i for i, p in enumerate(P) if p < Q[0])
        rhs = _dist(points[P[-1]], points[Q[-1]])
        first = _le(_dist(points[P[v]], points[Q[0]]), rhs, f + d + 1)
        second = _le(_dist(points[P[v]], points[P[-1]]), rhs, f + d + 1)
        if not (first and second):
            violations.append((P, Q))
    return violations, checked
