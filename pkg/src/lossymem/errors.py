"""Exceptions raised by the numerical solvers."""


class ConvergenceError(RuntimeError):
    """A root finder or quadrature could not reach the requested tolerance."""
