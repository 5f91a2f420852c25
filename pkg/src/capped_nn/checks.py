"""Randomised invariant checks shared by ``selftest`` and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field

from .dyadic import ONE, Dyadic, Order, _make, compare, exact_compare
from .harness import path_inequality_check, run_trajectory, sample_path_pairs
from .learners import CappedNearestNeighbor, LearnerConfig
from .processes import ScheduleParams, gen_1nn_adversarial
from .reference import reference_trace
from .rng import SeededStream

__all__ = [
    "CheckResult",
    "random_sequence",
    "near_tie_pairs",
    "dyadic_filter_fuzz",
    "oracle_equivalence",
    "cap_invariant_fuzz",
    "path_inequality_canned",
]


@dataclass
class CheckResult:
    name: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" ({len(self.failures)} failures)" if self.failures else ""
        return f"{status}  {self.name}: {self.cases} cases{extra}"


def _point(rng: SeededStream, max_bits: int) -> Dyadic:
    if rng.below(64) == 0:
        return ONE
    # mostly coarse points so that ties and duplicates are common
    e = 1 + rng.below(4) if rng.below(10) < 6 else 1 + rng.below(max_bits)
    return _make(rng.bits(e), e)


def random_sequence(rng: SeededStream, length: int, labels: int = 2,
                    max_bits: int = 96, dup_rate: int = 4):
    """Points and labels with frequent duplicates (about 1 in ``dup_rate``)."""
    xs, ys = [], []
    for _ in range(length):
        if xs and rng.below(dup_rate) == 0:
            x = xs[rng.below(len(xs))]
        else:
            x = _point(rng, max_bits)
        xs.append(x)
        ys.append(rng.below(labels))
    return xs, ys


def near_tie_pairs(rng: SeededStream, max_bit: int = 4096):
    """A pair differing only at bit position ``j <= max_bit`` (or equal)."""
    e = 1 + rng.below(max_bit)
    m = rng.bits(e)
    j = 1 + rng.below(e)
    a = _make(m, e)
    kind = rng.below(4)
    if kind == 0:
        return a, a
    if kind == 1:
        # same value, different representation path
        return a, _make(m << 3, e + 3)
    delta = 1 << (e - j)
    m2 = m + delta if m + delta < (1 << e) else m - delta
    return a, _make(m2, e)


def dyadic_filter_fuzz(n: int = 100_000, seed: int = 0, max_bit: int = 4096) -> CheckResult:
    rng = SeededStream(seed, ("filter-fuzz",))
    res = CheckResult("filter+fallback compare == exact compare", n)
    for i in range(n):
        if i % 2:
            a, b = near_tie_pairs(rng, max_bit)
        else:
            e1, e2 = 1 + rng.below(128), 1 + rng.below(128)
            a, b = _make(rng.bits(e1), e1), _make(rng.bits(e2), e2)
        if rng.below(2):
            a, b = b, a
        # oracle: cross-multiplied integers, independent of both code paths
        lhs = a.numerator << b.exponent
        rhs = b.numerator << a.exponent
        want = Order.LESS if lhs < rhs else Order.GREATER if lhs > rhs else Order.EQUAL
        got = compare(a, b)
        if got is not want or exact_compare(a, b) is not want:
            res.failures.append((a, b, got, want))
    return res


def _rule_cfgs(ks=(1, 2, 4)):
    cfgs = [LearnerConfig("memo"), LearnerConfig("1nn")]
    cfgs += [LearnerConfig("kc1nn", k=k) for k in ks]
    cfgs += [LearnerConfig("knn", schedule="floor_log2"), LearnerConfig("knn", schedule="floor_sqrt"),
             LearnerConfig("knn", k=3, schedule="constant")]
    return cfgs


def oracle_equivalence(n: int = 500, max_len: int = 200, seed: int = 0,
                       cfgs=None, corrupt_tie_break: bool = False) -> list[CheckResult]:
    """Incremental learners against :func:`reference_trace`, state by state."""
    out = []
    for cfg in cfgs or _rule_cfgs():
        rng = SeededStream(seed, ("oracle", cfg.name))
        res = CheckResult(f"oracle equivalence [{cfg.name}]", n)
        for case in range(n):
            xs, ys = random_sequence(rng, 1 + rng.below(max_len), labels=3)
            model = cfg.build()
            if corrupt_tie_break and isinstance(model, CappedNearestNeighbor):
                model._tie_min = False
            for t, (pred_ref, st_ref) in enumerate(reference_trace(cfg, xs, ys)):
                pred = model.step(xs[t], ys[t])
                if pred != pred_ref:
                    res.failures.append((case, t + 1, "prediction", pred, pred_ref))
                    break
                if model.state.canonical() != st_ref.canonical():
                    res.failures.append((case, t + 1, "state"))
                    break
        out.append(res)
    return out


def cap_invariant_fuzz(n: int = 1000, max_len: int = 500, ks=(1, 2, 4),
                       seed: int = 0) -> list[CheckResult]:
    """Child counts never exceed k; membership iff neither deleted nor duplicate."""
    out = []
    for k in ks:
        rng = SeededStream(seed, ("cap", k))
        res = CheckResult(f"cap invariant and deletion law [k={k}]", n)
        for case in range(n):
            xs, ys = random_sequence(rng, 1 + rng.below(max_len))
            model = CappedNearestNeighbor(k)
            s = model.state
            nondup, deleted = set(), set()
            seen = set()
            for t, (x, y) in enumerate(zip(xs, ys), start=1):
                model.step(x, y)
                if x not in seen:
                    seen.add(x)
                    nondup.add(t)
                n_del = len(deleted)
                deleted.update(u for u, _ in s.deletions[n_del:])
                phi = s.parent.get(t)
                bad = (max(s.child_count.values(), default=0) > k
                       or s.dataset != nondup - deleted
                       or (phi is not None and (s.child_count[phi] == k) != (phi in deleted))
                       or (t not in nondup and (t in s.child_count or t in s.dataset)))
                if bad:
                    res.failures.append((case, t))
                    break
            else:
                if {u for u, c in s.child_count.items() if c == k} != deleted:
                    res.failures.append((case, "final"))
        out.append(res)
    return out


def path_inequality_canned(horizon: int = 2000, seed: int = 11, pairs: int = 2000) -> CheckResult:
    traj = gen_1nn_adversarial(seed, ScheduleParams.for_preset("1nn", horizon=horizon))
    _, model = run_trajectory(traj, None, LearnerConfig("kc1nn", k=2), keep_learner=True)
    tree = model.tree()
    points = {u: x for u, (x, _) in model.state.points_by_time.items()}
    violations, checked = path_inequality_check(tree, points, sample_path_pairs(tree, pairs, seed))
    res = CheckResult("path inequality on a recorded 2C1NN tree", checked, violations)
    if checked == 0:
        res.failures.append("no qualifying pairs")
    return res
