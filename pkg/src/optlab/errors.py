"""Exception hierarchy shared across the workbench.

Malformed inputs raise; negative verdicts on well-formed inputs are returned
as result values by the functions that produce them.
"""

from __future__ import annotations


class OptlabError(Exception):
    """Base class for every error raised by this package."""


class TypeMismatchError(OptlabError):
    """Sequential composition of wires with different system types."""


class UnknownSystemError(OptlabError):
    """A system label that no backend declaration resolves."""


class UnknownBoxError(OptlabError):
    """A primitive box name with no binding in scope."""


class NotPhysicalError(OptlabError):
    """A payload rejected by the backend's physicality check.

    Carries the certificate so callers can report the witness.
    """

    def __init__(self, certificate) -> None:
        super().__init__(str(certificate))
        self.certificate = certificate


class OutOfRangeError(OptlabError):
    """A scalar that should be a probability lies outside [0, 1] beyond tolerance."""

    def __init__(self, value: float, tol: float) -> None:
        super().__init__(f"scalar {value!r} outside [0, 1] beyond tolerance {tol!r}")
        self.value = value
        self.tol = tol


class NormalizationViolationError(OptlabError):
    """Outcome probabilities of a complete test circuit do not sum to one."""

    def __init__(self, total: float, tol: float) -> None:
        super().__init__(f"outcome probabilities sum to {total!r}, not 1 within {tol!r}")
        self.total = total
        self.tol = tol


class CausalityViolationError(OptlabError):
    """An observation test whose effects do not sum to the unique trace effect."""

    def __init__(self, residual: float, which=None) -> None:
        detail = f" (test {which!r})" if which is not None else ""
        super().__init__(f"effect sum differs from the trace effect by {residual!r}{detail}")
        self.residual = residual
        self.which = which


class MarginalMismatchError(OptlabError):
    """Two joint states that were claimed to share a marginal do not."""


class BranchSumMismatchError(OptlabError):
    """Branches that must sum to a stated total do not, beyond tolerance."""


class UnsupportedBranchError(OptlabError):
    """A decomposition branch sticking out of the support of the total state."""


class IncompleteTestError(OptlabError):
    """A test whose branch sum is not deterministic (trace-preserving)."""


class BackendLacksPurificationError(OptlabError):
    """The backend admits no purification of the given state."""


class BackendLacksDilationError(OptlabError):
    """The backend admits no pure dilation of the given transformation."""


class NotPureError(OptlabError):
    """An operation that requires a pure input received a mixed one."""


class DslParseError(OptlabError):
    """Source-located error in the text format.

    ``line`` and ``column`` are 1-based.  ``expected`` optionally lists the
    token kinds that would have been accepted at the failure point.
    """

    def __init__(self, message: str, line: int, column: int, expected=None) -> None:
        loc = f"line {line}, column {column}"
        if expected:
            message = f"{message} (expected one of: {', '.join(sorted(expected))})"
        super().__init__(f"{loc}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected)) if expected else ()
