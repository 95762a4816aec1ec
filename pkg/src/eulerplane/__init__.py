"""Euler numbers of surface-group actions on the plane.

Modules: ``planemap`` (plane maps as expressions), ``curve`` (sampled arcs
and loops), ``cover`` (lifts to the universal cover of a punctured plane),
``euler`` (the Euler-number algorithms), ``zoo`` (named actions), ``scene``
and ``cli`` (the command line).
"""
from . import cover, curve, euler, planemap, zoo
from .euler import (
    PlanarAction,
    all_methods,
    applicable_methods,
    compute,
    euler_via_graphical,
    euler_via_lift,
    euler_via_signed_sum,
    euler_via_writhe_difference,
)

__version__ = "0.1.0"

__all__ = [
    "cover", "curve", "euler", "planemap", "zoo", "PlanarAction", "all_methods",
    "applicable_methods", "compute", "euler_via_graphical", "euler_via_lift",
    "euler_via_signed_sum", "euler_via_writhe_difference", "__version__",
]
