"""Exception types shared across the toolkit."""


class EhdnasError(Exception):
    """Base class for all toolkit errors."""


class InvalidArch(EhdnasError):
    """Architecture indices out of range or wrong length for the space."""


class NumericalError(EhdnasError):
    """Non-finite value produced or consumed by a numeric routine."""


class InvalidConfig(EhdnasError):
    """Configuration value outside its documented domain."""


class InfeasibleAllocation(EhdnasError):
    """Resource allocation cannot satisfy its minimum requirements."""


class EmptyDataset(EhdnasError):
    """Dataset has no usable records."""


class ParseError(EhdnasError):
    """Malformed file content; message carries the offending location."""


class ValidationError(EhdnasError):
    """Well-formed content violating a semantic constraint."""


class VersionMismatch(EhdnasError):
    """File format tag is not one this build understands."""


class MismatchedSpace(EhdnasError):
    """Two objects built for different search spaces were combined."""


class SpaceTooLarge(EhdnasError):
    """Exhaustive enumeration requested on a space above the cap."""
