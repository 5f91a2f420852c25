"""
The prediction tree of a capped learner
=======================================

Every new point hangs under the dataset point whose label it copied.
With cap 2 each node has at most two children, and any two disjoint
downward paths ending in the surviving dataset obey a distance bound
that grows like 2^(path lengths).
"""
from collections import Counter

from capped_nn import LearnerConfig, ScheduleParams, run_trajectory
from capped_nn import dyadic as dy
from capped_nn.harness import path_inequality_check, sample_path_pairs
from capped_nn.processes import gen_1nn_adversarial
from capped_nn.spaces import IndicatorIntervalBelow

# three steps by hand: 1/4, 3/4, 5/16 against the indicator of [0, 1/2)
f = IndicatorIntervalBelow(dy.HALF)
m = LearnerConfig.parse("2c1nn").build()
for x in ("1/2^2", "3/2^2", "5/2^4"):
    x = dy.parse(x)
    print(x, "predicted", m.step(x, f(x)), "true", f(x))
tree = m.tree()
print("parents", tree.parent, "deleted", tree.deleted, "dataset", sorted(m.state.dataset))

traj = gen_1nn_adversarial(4, ScheduleParams.for_preset("1nn", horizon=10000))
rep, model = run_trajectory(traj, None, LearnerConfig.parse("2c1nn"), keep_learner=True)
summary = {k: v for k, v in rep.tree.items() if k != "depth_histogram"}
print(summary, "max depth", max(map(int, rep.tree["depth_histogram"])))

tree = model.tree()
print("children per node:", Counter(len(c) for c in tree.children.values()))
points = {u: x for u, (x, _) in model.state.points_by_time.items()}
pairs = sample_path_pairs(tree, 3000, seed=0)
violations, checked = path_inequality_check(tree, points, pairs)
print(f"{checked} path pairs checked, {len(violations)} violations")
print("longest sampled path:", max(max(len(p), len(q)) for p, q in pairs))
