"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: configuration problems
exit 2, numeric failures exit 3, verification failures exit 1.
"""


class LevySandwichError(Exception):
    """Base class for all package errors."""


class ConfigError(LevySandwichError, ValueError):
    """Invalid configuration, model specification, or operation precondition."""


class ZeroBigJumpRate(ConfigError):
    """The cutoff interval swallowed every jump: no jump mass outside it."""


class NumericError(LevySandwichError, ArithmeticError):
    """A quadrature or numeric routine failed to converge."""


class HorizonExceeded(LevySandwichError):
    """A first-passage simulation hit its time cap before exiting.

    Signals the cap, not absence of an exit.
    """

    def __init__(self, cap: float):
        super().__init__(f"no exit before the time cap t={cap:g}")
        self.cap = cap
