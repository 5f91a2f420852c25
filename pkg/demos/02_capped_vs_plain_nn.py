"""
Capped vs plain nearest neighbour on an adversarial stream
==========================================================

Every block plants one dyadic anchor (label 1) and then a run of
points converging to it (label 0).  Plain 1NN keeps copying the
anchor's label; the 2-capped rule retires the anchor after two uses.
"""
import numpy as np

from capped_nn import LearnerConfig, ScheduleParams, run_trajectory
from capped_nn.processes import gen_1nn_adversarial

horizon = 5000
params = ScheduleParams.for_preset("1nn", "desk", horizon)
print("block starts:", [params.n(k) for k in range(1, 8)])
print("anchor orders:", [params.p(k) for k in range(1, 4)])

traj = gen_1nn_adversarial(seed=1, params=params)
for s in traj.samples[:6]:
    print(s.t, s.provenance, s.y, float(s.x))

# memo looks good only because unseen points get the default label 0,
# which is what every perturbed point carries; it errs on anchors alone
checkpoints = [500, 1000, 2000, 5000]
for spec in ("1nn", "2c1nn", "4c1nn", "memo"):
    rep = run_trajectory(traj, None, LearnerConfig.parse(spec), checkpoints)
    print(f"{spec:6s}", np.round(rep.avg_loss, 3), "deletions:", rep.deletions)

# a dozen seeds: the gap is not a fluke of one trajectory
gaps = []
for seed in range(12):
    t = gen_1nn_adversarial(seed, params)
    one = run_trajectory(t, None, LearnerConfig.parse("1nn"), [horizon]).avg_loss[-1]
    two = run_trajectory(t, None, LearnerConfig.parse("2c1nn"), [horizon]).avg_loss[-1]
    gaps.append(one - two)
print("loss gap 1NN - 2C1NN: mean %.3f, min %.3f" % (np.mean(gaps), np.min(gaps)))
