"""Free arcs for a pair of translations.

A segment from p to a1(p) meets its translate only at the shared endpoint.
Twisting it k times near the endpoint shifts the canonical writhe by k.
"""
from eulerplane import euler, zoo
from eulerplane.curve import add_twist

action = zoo.free_translations()
alpha = action["a1"]
seg = zoo.free_segment(action)
print(f"segment is free: {euler.is_free_arc(alpha, seg)}")
for k in range(-2, 3):
    d = add_twist(seg, k) if k else seg
    b = euler.coefficients_b(alpha, d, 4)
    print(f"k = {k:+d}: b_-1, b_1 = {b[-1]:+d}, {b[1]:+d}; canonical writhe {euler.canonical_writhe(alpha, d):+d}")
