"""Passing to the index 2n+1 subgroup generated by a1 and b1^(2n+1).

The coefficients A_j of the subgroup can be computed directly or as a
convolution of the a_i; both are printed, and the X_3 weight is drawn.
"""
from pathlib import Path

from eulerplane import euler, svg, zoo

action = zoo.torus_twist_chain(1)
for n in (1, 2, 3):
    rep = euler.covering_trick_check(action, n=n)
    print(f"n = {n}: sum X_n(i) a_i = {rep.weighted_sum} = (2n+1) e; "
          f"direct A_j {rep.A_direct}, convolution {rep.A_convolution}")

out = Path(__file__).with_name("x3.svg")
svg.emit_svg(svg.xn_figure(3), out)
print(f"graph of X_3 written to {out}")
