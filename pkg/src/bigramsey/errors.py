"""Exception hierarchy shared by every module."""


class BigRamseyError(Exception):
    pass


class DomainError(BigRamseyError, ValueError):
    """An argument lies outside the operation's domain."""


class StructuralError(BigRamseyError, ValueError):
    """Structures with incompatible signatures were combined."""


class InternalError(BigRamseyError, RuntimeError):
    """A consistency check that must always hold has failed."""


class Unsupported(BigRamseyError):
    """The requested (class, target) pair has no licensed computation."""
