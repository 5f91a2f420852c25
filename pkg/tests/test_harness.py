from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from capped_nn import dyadic as dy
from capped_nn.harness import (
    HarnessError,
    Interval,
    compare_learners,
    config_hash,
    crf_frequency,
    default_checkpoints,
    path_inequality_check,
    run_monte_carlo,
    run_trajectory,
    sample_path_pairs,
)
from capped_nn.learners import CappedNearestNeighbor, LearnerConfig, PredictionTree
from capped_nn.processes import (
    LabeledSample,
    ScheduleParams,
    Trajectory,
    gen_1nn_adversarial,
    gen_finite_support,
    gen_iid_uniform,
    gen_knn_adversarial,
)
from capped_nn.spaces import Constant, IndicatorIntervalBelow

from conftest import D

TWO = LearnerConfig("kc1nn", k=2)


def _traj(xs, f):
    return Trajectory([LabeledSample(t, x, f(x), "support") for t, x in enumerate(xs, 1)], "x", 0)


def test_checkpoints_default():
    assert default_checkpoints(20000) == [256, 512, 1024, 2048, 4096, 8192, 16384, 20000]
    assert default_checkpoints(100) == [100]
    assert default_checkpoints(512) == [256, 512]


def test_hand_trace_errors():
    f = IndicatorIntervalBelow(D("1/2"))
    traj = _traj([D("1/4"), D("3/4"), D("5/16")], f)
    rep = run_trajectory(traj, f, TWO, [1, 2, 3])
    assert rep.errors == [1, 2, 2]
    assert rep.error_times == [1, 2]
    assert rep.losses == [1, 1, Fraction(2, 3)]
    assert rep.dataset_size == [1, 2, 2] and rep.deletions == 1


def test_memorisation_on_two_points():
    traj = gen_finite_support(4, [D("1/4"), D("3/4")], 1000, IndicatorIntervalBelow(D("1/2")))
    rep = run_trajectory(traj, None, LearnerConfig("memo"), [1000])
    assert rep.errors[-1] <= 2
    assert rep.avg_loss[-1] <= 2 / 1000


def test_constant_target_zero_loss():
    traj = gen_iid_uniform(1, 600)
    for cfg in (TWO, LearnerConfig("knn"), LearnerConfig("1nn")):
        rep = run_trajectory(traj, Constant(0), cfg, [100, 600])
        assert rep.errors == [0, 0]


class _Spy(CappedNearestNeighbor):
    """Records the order of calls and whether a label leaked before predicting."""

    def __init__(self, log):
        super().__init__(2)
        self.log = log

    def predict(self, x):
        self.log.append(("spy-predict", self.t + 1))
        return super().predict(x)

    def reveal(self, y):
        self.log.append(("spy-reveal", self.t + 1))
        return super().reveal(y)


def test_prediction_before_reveal():
    traj = gen_1nn_adversarial(0, ScheduleParams.for_preset("1nn", horizon=300))
    log = []
    spy = _Spy(log)
    run_trajectory(traj, None, spy, [300], log=log)
    assert len(log) == 4 * 300
    for t in range(1, 301):
        block = log[4 * (t - 1): 4 * t]
        assert block == [("spy-predict", t), ("predict", t), ("spy-reveal", t), ("reveal", t)]


def test_loss_curve_replays_from_error_times():
    traj = gen_1nn_adversarial(5, ScheduleParams.for_preset("1nn", horizon=3000))
    for cfg in (TWO, LearnerConfig("1nn")):
        rep = run_trajectory(traj, None, cfg)
        assert rep.replayed_errors() == rep.errors
        assert all(0 <= v <= 1 for v in rep.avg_loss)


def test_horizon_shortfall():
    traj = gen_iid_uniform(1, 50)
    with pytest.raises(HarnessError):
        run_trajectory(traj, None, TWO, [100])


def test_aggregate_single_trial_and_exact_mean():
    spec = {"generator": "1nn_adversarial", "horizon": 1000}
    one = run_monte_carlo(spec, None, TWO, 1, 3, [500, 1000])
    traj = gen_1nn_adversarial(one.seeds[0], ScheduleParams.for_preset("1nn", horizon=1000))
    assert one.mean_exact == run_trajectory(traj, None, TWO, [500, 1000]).losses
    many = run_monte_carlo(spec, None, TWO, 4, 3, [500, 1000])
    for j in range(2):
        col = [row[j] for row in many.trial_losses]
        assert many.mean_exact[j] == sum(col, Fraction(0)) / 4
        assert min(col) <= many.mean_exact[j] <= max(col)


def test_degenerate_zero_spread():
    spec = {"generator": "iid_uniform", "horizon": 300}
    agg = run_monte_carlo(spec, {"name": "constant", "label": 0}, TWO, 3, 0, [300])
    assert agg.quantile(0.1) == agg.quantile(0.9) == agg.mean_loss == [0.0]


def test_parallel_equals_serial():
    spec = {"generator": "knn_adversarial", "horizon": 600}
    cfgs = [TWO, LearnerConfig("knn")]
    a = compare_learners(spec, None, cfgs, 3, 1, [600], workers=1)
    b = compare_learners(spec, None, cfgs, 3, 1, [600], workers=2)
    assert {k: v.to_dict() for k, v in a.items()} == {k: v.to_dict() for k, v in b.items()}


def test_config_hash_stable():
    assert config_hash({"a": 1, "b": [2]}) == config_hash({"b": [2], "a": 1})
    assert len(config_hash({})) == 16


def test_crf_examples():
    const = _traj([D("1/4")] * 10, lambda x: 0)
    half = [Interval(dy.ZERO, dy.HALF)]
    assert crf_frequency(const, half, [1, 10]) == [(1, 1.0), (10, 1.0)]
    whole = [Interval(dy.ZERO, dy.ONE, True, True)]
    traj = gen_iid_uniform(2, 100)
    assert crf_frequency(traj, whole, [100]) == [(100, 1.0)]
    with pytest.raises(HarnessError):
        crf_frequency(traj, [], [10])
    with pytest.raises(HarnessError):
        crf_frequency(traj, [Interval(dy.HALF, dy.ZERO)], [10])


@given(st.lists(st.integers(0, 16), min_size=1, max_size=50))
def test_crf_counts_against_fractions(ms):
    xs = [dy.normalize(m, 4) for m in ms]
    iv = [Interval(D("1/4"), D("1/2"), False, True), Interval(D("3/4"), dy.ONE)]
    want = sum(1 for m in ms if 4 < m <= 8 or 12 <= m < 16) / len(ms)
    assert crf_frequency(_traj(xs, lambda x: 0), iv, [len(ms)])[0][1] == want


def _tree(parent, deleted=()):
    nodes = sorted(set(parent) | set(parent.values()))
    children = {u: sorted(v for v, p in parent.items() if p == u) for u in nodes}
    return PredictionTree(nodes, dict(parent), children, set(deleted),
                          [u for u in nodes if u not in parent])


def test_path_check_degenerate():
    single = _tree({}, ())
    single.nodes, single.children, single.roots = [1], {1: []}, [1]
    assert sample_path_pairs(single, 10) == []
    assert path_inequality_check(single, {1: dy.HALF}, []) == ([], 0)
    t = _tree({2: 1, 3: 1})
    pts = {1: D("1/2"), 2: D("1/4"), 3: D("3/4")}
    assert path_inequality_check(t, pts, [([2], [2])]) == ([], 0)  # identical paths skipped
    assert path_inequality_check(t, pts, [([3], [2])]) == ([], 0)  # p_0 > q_0 skipped


def test_path_check_flags_violation():
    # hand-built tree whose geometry breaks the inequality: the check must notice
    t = _tree({3: 1, 4: 2})
    # the path ends sit 2^-9 apart, so the bound 2^3 * 2^-9 is far below 3/4
    pts = {1: D("1/8"), 2: D("7/8"), 3: dy.normalize(511, 10), 4: dy.normalize(513, 10)}
    violations, checked = path_inequality_check(t, pts, [([1, 3], [2, 4])])
    assert checked == 1 and violations == [([1, 3], [2, 4])]


@pytest.mark.parametrize("gen,process", [(gen_1nn_adversarial, "1nn"),
                                         (gen_knn_adversarial, "knn")])
def test_recorded_trees_satisfy_path_inequality(gen, process):
    traj = gen(8, ScheduleParams.for_preset(process, horizon=3000))
    _, model = run_trajectory(traj, None, TWO, keep_learner=True)
    tree = model.tree()
    pts = {u: x for u, (x, _) in model.state.points_by_time.items()}
    pairs = sample_path_pairs(tree, 1500, seed=1)
    violations, checked = path_inequality_check(tree, pts, pairs)
    assert checked == len(pairs) > 1000
    assert violations == []
    for P, Q in pairs:
        assert P[0] < Q[0] and not set(P) & set(Q)
        assert P[-1] not in tree.deleted and Q[-1] not in tree.deleted
