"""Coefficient tables for commuting torus actions.

For a1 fixing p and b1 moving p along a proper orbit, a_i compares how a1(tau)
and tau cross the translates b1^i(tau).  The signed sum is the Euler number,
zero here, and agrees with the writhe difference of a1(tau) and tau.
"""
from eulerplane import euler, zoo

for seed in range(4):
    action = zoo.torus_twist_chain(seed)
    table = euler.coefficients_a(action, N=8)
    nz = {i: v for i, v in table.as_dict().items() if v}
    print(f"twist chain seed {seed}: nonzero a_i {nz}, signed sum {table.signed_sum()}, "
          f"writhe difference {euler.euler_via_writhe_difference(action).value}")
