"""Exceptions raised by the registration routines."""


class RegistrationError(Exception):
    """Base class for all registration failures."""


class InvalidInput(RegistrationError, ValueError):
    """Malformed point sets, inconsistent shapes or bad configuration."""


class ZeroMassError(RegistrationError):
    """All posterior mass sits on the outlier component."""


class DegenerateGeometryError(RegistrationError):
    """The rigid solve is not uniquely determined by the inputs."""


class SingularGeometryError(DegenerateGeometryError):
    """The affine normal equations are numerically singular."""


class EmptyTruth(RegistrationError):
    """No moving point carries a ground-truth correspondence."""
