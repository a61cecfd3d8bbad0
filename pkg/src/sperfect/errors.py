"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class StructuralError(ValueError):
    """A witness or representation is malformed or does not verify."""


class ResourceError(RuntimeError):
    """A configured memory or work cap would be exceeded."""


class SearchExhausted(RuntimeError):
    """The exact search hit its budget before reaching a decision."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"search budget exhausted while deciding n={n}")


class EnumerationError(RuntimeError):
    """An enumeration could not decide some n in its range."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"enumeration aborted: solver exhausted at n={n}")


class CacheFormatError(ValueError):
    """A cache file is malformed or belongs to a different job."""

    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")
