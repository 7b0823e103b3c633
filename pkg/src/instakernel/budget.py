"""Enumeration budgets and the errors shared across the package.

Every potentially explosive enumeration (cone points, lattice boxes, dynamic
programming tables, configuration sets) is gated by an explicit budget so the
library degrades into a clean error instead of an accidental multi-hour loop.
"""

from __future__ import annotations

import os

# Default caps, overridable per call or via INSTAKERNEL_BUDGET.
CONE_POINT_BUDGET = 10**6      # number of integer points scanned per cone build/check
BOX_ENUM_BUDGET = 10**7        # product of box side lengths in enumerate_feasible
DP_CELL_BUDGET = 10**6         # dynamic-programming table cells
ILP_NODE_BUDGET = 10**6        # branch-and-bound nodes
CONFIG_BUDGET = 10**6          # machine configurations enumerated per instance

ENV_BUDGET_VAR = "INSTAKERNEL_BUDGET"


class BudgetError(Exception):
    """An enumeration would exceed its configured budget."""


class InputError(Exception):
    """Malformed or inconsistent problem input."""


class VerificationError(Exception):
    """A claimed equivalence failed its independent check."""


def resolve_budget(explicit: int | None, default: int) -> int:
    """Pick the effective budget: explicit argument > environment > default."""
    if explicit is not None:
        if explicit <= 0:
            raise InputError("budget must be positive")
        return explicit
    env = os.environ.get(ENV_BUDGET_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise InputError(f"{ENV_BUDGET_VAR} must be an integer, got {env!r}") from exc
        if value <= 0:
            raise InputError(f"{ENV_BUDGET_VAR} must be positive")
        return value
    return default
