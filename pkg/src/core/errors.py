"""Exception hierarchy shared by solvers, simulators and the CLI."""

from __future__ import annotations


class ExponentError(Exception):
    """Base class for every failure raised by this package."""

    exit_code = 1


class StructuralError(ExponentError):
    """Unknown, duplicated or overlapping axis labels."""

    exit_code = 2


class ModelValidationError(ExponentError):
    """A pmf, channel, model file or numeric input violates its invariants."""

    exit_code = 2


class PreconditionError(ExponentError):
    """A mode or support condition required by a region formula fails."""

    exit_code = 3


class DivergenceInfiniteError(PreconditionError):
    """Absolute continuity fails for a KL divergence term."""

    def __init__(self, term: str, cell: tuple[int, ...]) -> None:
        self.term = term
        self.cell = cell
        super().__init__(
            f"{term} is infinite: absolute continuity fails at cell {cell} "
            "(first law positive where the second law is zero)"
        )


class InfeasibleConstraintsError(ExponentError):
    """Marginal constraints admit no distribution absolutely continuous to the target."""

    exit_code = 3


class ConvergenceError(ExponentError):
    """An iterative solver stopped before reaching its tolerance."""

    exit_code = 4

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")


class ResourceBudgetError(ExponentError):
    """An exact or simulated computation would exceed its resource budget."""

    exit_code = 5
