"""
Exact dyadic arithmetic
=======================

Points live in [0, 1] as m / 2^e with an arbitrary-size integer m.
Comparisons try a double-precision estimate first and fall back to
integers only when the estimate cannot decide.
"""
from capped_nn import dyadic as dy

a = dy.normalize(6, 3)          # stored reduced
print(a, a.numerator, a.exponent)  # 3/2^2

x = dy.parse("3/2^3")
y = dy.parse("1/2^3")
print(dy.abs_diff(x, y))        # 1/2^2
print(dy.add(dy.parse("1/2^2"), y))
print(dy.shift_right(x, 2))     # 3/2^5

# two points 2^-80 apart look identical as doubles
left = dy.normalize((1 << 79) - 1, 80)
print(float(left) == float(dy.HALF))
print(dy.filter_compare(left, dy.HALF))   # None: the estimate abstains
print(dy.compare(left, dy.HALF))          # Order.LESS, settled exactly

# the neighbours of 3/8 among the order-3 dyadics, nearest first
print([str(v) for v in dy.closest_dyadics(x, 3, 4)])

# text and binary forms round-trip bit for bit
deep = dy.normalize(12345678901234567890123456789, 300)
assert dy.parse(str(deep)) == deep
assert dy.from_bytes(dy.to_bytes(deep)) == deep
print(len(dy.to_bytes(deep)), "bytes for a 300-bit point")
