"""Twists in the annuli 2^k [0.9, 1.1] commute with the doubling map.

Lifting both maps to the universal cover of the punctured plane, the
commutator of the lifts is a deck translation: one full turn per unit of
twisting.
"""
from eulerplane import cover, euler, zoo

for n in (-2, -1, 0, 1, 2, 3):
    action = zoo.bestvina(n)
    turns = cover.deck_turns(action.lift, euler.relator_word(1), action)
    print(f"n = {n:+d}: lifted commutator turns the cover by {turns:+.12f} -> Euler number "
          f"{euler.euler_via_lift(action).value:+d}")
