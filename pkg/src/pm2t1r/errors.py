"""Exception types shared across the package."""


class KinematicsError(Exception):
    """Base class for all errors raised by pm2t1r."""


class DomainError(KinematicsError, ValueError):
    """An input lies outside the domain of a constraint equation."""


class DegenerateHalfAngle(KinematicsError):
    """The tilt angle is undetermined: both half-angle forms read 0/0."""


class NotReal(KinematicsError):
    """A real configuration was required but the solution is complex."""


class SingularError(KinematicsError):
    """The parallel Jacobian cannot be inverted at this configuration."""


class Infeasible(KinematicsError):
    """A design search found no admissible length below its cap."""
