"""Exception hierarchy shared by every module."""


class RopeError(Exception):
    """Base class; ``kind`` is the machine-readable tag printed by the CLI."""

    kind = "error"


class DomainError(RopeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    kind = "domain"


class ContractError(RopeError):
    """A caller broke a structural precondition (shape, state, ordering)."""

    kind = "contract"
