"""Shared exception types."""


class TreefamError(Exception):
    """Base class for all library errors."""


class ParseError(TreefamError, ValueError):
    """Malformed literal; carries the offending position when known."""

    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        if text is not None:
            message = f"{message} in {text!r}"
        super().__init__(message)


class CapExceeded(TreefamError, ValueError):
    """Input larger than a configured desk-scale cap."""


class ProbeBudgetExceeded(TreefamError, RuntimeError):
    """A branch stream ran dry before the requested structure was found."""


class HypothesisViolation(TreefamError):
    """A lower-estimate hypothesis failed; names the violated clause."""

    def __init__(self, clause, detail=""):
        self.clause = clause
        self.detail = detail
        msg = f"hypothesis violated [{clause}]"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)
