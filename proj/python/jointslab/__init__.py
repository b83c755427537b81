"""Exact joints configurations, vanishing ledgers and verification checks."""

from ._jointslab import (
    DEFAULT_PRIME,
    JointslabError,
    balance,
    bound,
    generate,
    ledger_totals,
    rank_check,
    summary,
    vanishing_order,
)

__all__ = [
    "DEFAULT_PRIME",
    "JointslabError",
    "balance",
    "bound",
    "generate",
    "ledger_totals",
    "rank_check",
    "summary",
    "vanishing_order",
]
