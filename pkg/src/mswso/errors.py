"""Exceptions shared across modules."""


class NoConvergence(RuntimeError):
    """An iteration budget ran out.

    Signals that a tolerance or ``max_iter`` setting is too tight for the
    input, not that the underlying mathematical object fails to exist.
    """


class ValidationError(ValueError):
    """Input violates a documented precondition."""
