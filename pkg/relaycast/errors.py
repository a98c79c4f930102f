from __future__ import annotations


class RelaycastError(Exception):
    """Base error; `exit_code` is what the CLI returns for it."""

    exit_code: int = 1


class ScenarioParseError(RelaycastError):
    exit_code = 3


class ScenarioValidationError(RelaycastError, ValueError):
    exit_code = 4


class ValidationFailed(RelaycastError):
    """At least one analytic-vs-simulation check failed."""

    exit_code = 5


class ResourceCapError(RelaycastError):
    exit_code = 6


class UnsupportedFieldError(RelaycastError, ValueError):
    exit_code = 4


class InfeasibleAtCapError(RelaycastError):
    """min_transmissions hit its cap before meeting the target."""

    exit_code = 6

    def __init__(self, cap: int, best: float) -> None:
        super().__init__(f"target not reached within n_T <= {cap} (best {best:.6f})")
        self.cap = cap
        self.best = best
