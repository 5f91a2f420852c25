"""
Majority vote against planted neighbours
========================================

Each block opens with d_k + 1 dyadics crowded around an anchor, all
labelled 1, and continues with label-0 points converging on the anchor.
A log-schedule kNN sees only the planted crowd among its nearest
neighbours and keeps voting 1.
"""
from capped_nn import KnnSchedule, LearnerConfig, ScheduleParams, compare_learners
from capped_nn.processes import gen_knn_adversarial

params = ScheduleParams.for_preset("knn", "desk", 20000)
for k in (1, 5, 10, 50):
    print(f"k={k:3d} n_k={params.n(k):5d} block={params.block_length(k):4d} d_k={params.d(k)}")

# early blocks are too short to hold the crowd plus a tail
print("truncated blocks:", params.validate(KnnSchedule("floor_log2")))

traj = gen_knn_adversarial(3, ScheduleParams.for_preset("knn", horizon=400))
print([s.provenance[:4] for s in traj.samples[99:121]])

spec = {"generator": "knn_adversarial", "preset": "desk", "horizon": 8000}
learners = [LearnerConfig.parse(s) for s in ("knn:floor_log2", "knn:3", "2c1nn")]
aggs = compare_learners(spec, None, learners, trials=3, base_seed=0,
                        checkpoints=[1000, 4000, 8000])
for name, agg in aggs.items():
    print(f"{name:16s}", [round(v, 3) for v in agg.mean_loss])
