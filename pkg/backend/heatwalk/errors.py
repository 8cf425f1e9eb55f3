from __future__ import annotations

from typing import Any


class HeatwalkError(Exception):
    """Base class for every error raised by the library."""


class DegreeMismatchError(HeatwalkError, ValueError):
    pass


class BudgetExceededError(HeatwalkError):
    def __init__(self, what: str, requested: int | float, budget: int | float) -> None:
        super().__init__(f"{what}: {requested} exceeds budget {budget}")
        self.what = what
        self.requested = requested
        self.budget = budget


class PrecisionError(HeatwalkError):
    pass


class NotInIntervalError(HeatwalkError, ValueError):
    pass


class MalformedPathError(HeatwalkError, ValueError):
    pass


class IdentityViolation(HeatwalkError):
    """An exact identity failed; ``entry`` locates the first offending coefficient."""

    def __init__(self, name: str, entry: Any, lhs: Any, rhs: Any) -> None:
        super().__init__(f"{name} violated at {entry}: {lhs} != {rhs}")
        self.name = name
        self.entry = entry
        self.lhs = lhs
        self.rhs = rhs


def check_budget(what: str, requested: int | float, budget: int | float) -> None:
    if requested > budget:
        raise BudgetExceededError(what, requested, budget)
