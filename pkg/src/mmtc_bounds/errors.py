"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class InfeasibleSpecError(ValueError):
    """No blocklength (or transmission intensity) admits the requested constraint."""


class NoSolutionError(RuntimeError):
    """The SNR bracket could not be established for a target error probability."""


class SimulationUnstable(RuntimeError):
    """The retransmission backlog grows without bound (arrival rate above critical)."""

    def __init__(self, message, *, slot, backlog, lam, g):
        super().__init__(message)
        self.slot = slot
        self.backlog = backlog
        self.lam = lam
        self.g = g
