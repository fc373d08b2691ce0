"""Exception types raised across the package."""


class BilinstabError(Exception):
    """Base class for all package errors."""


class StructureError(BilinstabError):
    """Incompatible space, dimension or operator structure."""


class ValidationError(BilinstabError, ValueError):
    """A parameter violates its declared constraint.

    The offending field name is kept on ``field`` so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(BilinstabError, ValueError):
    """Argument outside the mathematical domain (e.g. negative time)."""


class BlowUpError(BilinstabError):
    """Non-finite state encountered during a simulation."""

    def __init__(self, last_time: float, message: str = "non-finite state"):
        super().__init__(f"{message} after t = {last_time!r}")
        self.last_time = last_time


class InsufficientDataError(BilinstabError, ValueError):
    """Not enough samples for the requested analysis."""


class NumericalError(BilinstabError):
    """An inner numerical procedure failed to converge."""


class UnknownScenarioError(BilinstabError, KeyError):
    def __init__(self, name: str, available):
        self.name = name
        self.available = sorted(available)
        super().__init__(
            f"unknown scenario {name!r}; available: {', '.join(self.available)}"
        )

    def __str__(self) -> str:
        return self.args[0]
