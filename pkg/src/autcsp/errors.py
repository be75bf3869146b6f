class AutCSPError(Exception):
    """Base class for library errors."""


class ParseError(AutCSPError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DomainMismatch(AutCSPError, ValueError):
    pass


class BudgetExceeded(AutCSPError):
    pass


class NotPolymorphism(AutCSPError):
    """Raised when a solver's polymorphism precondition fails; carries the verdict."""

    def __init__(self, name: str, verdict):
        self.verdict = verdict
        super().__init__(f"{name} is not a polymorphism of the automatic language")
