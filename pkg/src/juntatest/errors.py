"""Exception types shared across the package."""


class JuntatestError(Exception):
    """Base class for package errors."""


class InvalidArgument(JuntatestError, ValueError):
    """An argument violates a documented precondition (dimension mismatch etc.)."""


class ContractError(JuntatestError, RuntimeError):
    """A caller-supplied certificate or internal invariant failed verification."""


class ResourceLimitError(JuntatestError, RuntimeError):
    """A brute-force computation would exceed its configured budget."""


class SpecParseError(JuntatestError, ValueError):
    """A function/distribution file or spec string is malformed."""
