"""
Counting visited cells and empirical frequencies
================================================

A process visits o(T) cells of every partition when its cell count
grows sub-linearly.  A stream of fresh enumerated points hits a new
singleton cell every time; the adversarial stream clusters tightly and
touches few cells of a fine grid.
"""
from fractions import Fraction

from capped_nn import dyadic as dy
from capped_nn.config import parse_intervals
from capped_nn.harness import crf_frequency, default_checkpoints
from capped_nn.partitions import Centered, DistinctPoints, Grid, cells_visited_curve, \
    smv_ratio_report
from capped_nn.processes import gen_1nn_adversarial, gen_enumerated_fresh

c = Centered(dy.HALF)
print(c.cell(Fraction(3, 10)), c.bounds(("L", 2)))   # [1/4, 1/3) on the left
print(Grid(dy.HALF).cell(dy.ONE))                    # last cell is closed

T = 16384
ckpts = default_checkpoints(T)
fresh = smv_ratio_report(cells_visited_curve(gen_enumerated_fresh(T), DistinctPoints(), ckpts))
print("fresh points:", fresh.verdict, [round(r, 3) for r in fresh.ratios])

adv = gen_1nn_adversarial(0)
ckpts = default_checkpoints(len(adv))
grid = smv_ratio_report(cells_visited_curve(adv, Grid(dy.normalize(1, 10)), ckpts))
print("adversarial, grid 2^-10:", grid.verdict, [round(r, 3) for r in grid.ratios])

# the anchors are uniform, so the left half is visited about half the time
half = parse_intervals("[0/2^0,1/2^1)")
for T_, f in crf_frequency(adv, half, ckpts):
    print(T_, round(f, 4))
