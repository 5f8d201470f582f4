class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class CertificationError(Exception):
    """A certification run found a mathematical counterexample.

    ``witness`` carries whatever identifies the failing case, e.g. ``(p, m)``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
