"""Exception types shared across the package."""


class PathPulseError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PathPulseError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class LengthError(PathPulseError, ValueError):
    """A byte sequence has the wrong length for the expected format."""


class VersionError(PathPulseError, ValueError):
    """A datagram's version nibble is not valid for the requested operation."""


class MalformedError(PathPulseError, ValueError):
    """A frame is marked as carrying a trailer but is too short to hold one."""


class InputError(PathPulseError, ValueError):
    """Invalid planner or CLI input."""


class ConfigError(PathPulseError, ValueError):
    """Invalid or unknown run configuration."""


class UnknownProfileError(PathPulseError, KeyError):
    """Requested impairment profile name is not in the library."""


class UnknownExperimentError(PathPulseError, KeyError):
    """Requested experiment name is not registered."""


class SendError(PathPulseError, OSError):
    """A transport failed to send a frame."""
