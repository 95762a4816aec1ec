"""Exception hierarchy.

Three families matter to callers (and to the command-line exit codes):
precondition failures on inputs, numerical failures (residues, tolerances,
degenerate geometry met during a computation) and identity violations
(two routes to the same integer disagreeing).
"""


class EulerPlaneError(Exception):
    """Base class for every error raised by this package."""


class InputError(EulerPlaneError, ValueError):
    """An input violates a documented precondition."""


class NumericalError(EulerPlaneError):
    """A computation could not certify its result at the stated tolerance."""


class IdentityViolated(EulerPlaneError):
    """Two computations that must agree did not."""

    def __init__(self, message, lhs=None, rhs=None):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs


# planemap
class BadRadii(InputError):
    pass


class NotInjective(InputError):
    pass


class OverlappingSupports(InputError):
    pass


class SupportUnresolvable(InputError):
    pass


class NotDifferentiableHere(InputError):
    pass


# curve
class ResidueTooLarge(NumericalError):
    pass


class NonTransverseContact(NumericalError):
    pass


class CuspCorner(NumericalError):
    pass


class DegenerateEdge(NumericalError):
    pass


class NoFreeDisk(NumericalError):
    pass


class AntipodalTangents(NumericalError):
    pass


class ReturnPathCrossesEndpointBall(NumericalError):
    pass


class WritheChanged(NumericalError):
    pass


class NotInArcSpace(InputError):
    pass


# cover
class PathHitsCenter(NumericalError):
    pass


class ForbiddenRegionViolated(NumericalError):
    pass


class NotARelator(IdentityViolated):
    pass


# euler
class TailNotVanished(NumericalError):
    pass


class OrbitMaybeNonProper(InputError):
    pass


class OddParity(IdentityViolated):
    pass


class FixedPointSuspected(InputError):
    pass


class NotApplicable(InputError):
    """The requested method does not apply to this action."""


# scene files
class SceneError(InputError):
    """Scene file problem, located at ``line`` and ``column`` (1-based)."""

    def __init__(self, message, line=None, column=None, hint=None):
        where = f"line {line}, column {column}: " if line is not None else ""
        tail = f" (expected {hint})" if hint else ""
        super().__init__(f"{where}{message}{tail}")
        self.line = line
        self.column = column
        self.hint = hint


class SceneSyntaxError(SceneError):
    pass


class UnknownPrimitive(SceneError):
    pass


class UndeclaredGenerator(SceneError):
    pass


class BadParameter(SceneError):
    pass
