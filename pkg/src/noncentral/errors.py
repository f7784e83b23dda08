"""Exception hierarchy.

Domain errors mean the request is outside the model (no bound states, invalid
channel, singular point). Numerical errors mean a solver failed to deliver the
requested accuracy. The CLI maps the two families to different exit codes.
"""


class NoncentralError(Exception):
    """Base class for all package errors."""


class DomainError(NoncentralError, ValueError):
    pass


class AxisSingularityError(DomainError):
    """Evaluation on (or numerically at) the z-axis, where 1/sin^2(theta) diverges."""


class RingSingularityError(DomainError):
    """Parabolic evaluation at xi = 0 or eta = 0."""


class ChannelInvalidError(DomainError):
    """nu^2 + B - C < 0 or nu^2 + B + C < 0: the angular index would be complex."""

    def __init__(self, nu, B, C):
        self.nu, self.B, self.C = nu, B, C
        super().__init__(
            f"channel nu={nu} invalid for B={B}, C={C}: "
            f"nu^2+B-C={nu * nu + B - C:g}, nu^2+B+C={nu * nu + B + C:g}"
        )


class NoRootInBracketError(DomainError):
    pass


class NumericalError(NoncentralError, RuntimeError):
    pass


class ConvergenceError(NumericalError):
    pass


class BoxTooSmallError(NumericalError):
    """The highest requested radial state has not decayed at r_max."""


class ResolventDivergenceError(NumericalError):
    """The Euclidean-time integrand does not decay: E is at or above the sector's lowest level."""

    def __init__(self, message, decay_rate=None):
        self.decay_rate = decay_rate
        super().__init__(message)
