"""Error taxonomy shared across the toolkit.

The CLI maps these onto exit codes: invariant/integration failures are
distinct from argument errors and from I/O problems.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(ValueError):
    """An input exceeds a configured size cap (e.g. the assignment solver)."""


class IntegrationError(RuntimeError):
    """A simulated path left the representable range; carries the step index."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InvariantError(RuntimeError):
    """A statistical or structural self-check failed."""
