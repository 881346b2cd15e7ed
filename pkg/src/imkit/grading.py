"""Verdict grades.

Every check reports how strong its evidence is. Aggregation never upgrades:
the overall grade of a report is the weakest grade that contributed.
"""

from __future__ import annotations

import enum


class Grade(enum.Enum):
    PROVEN = "proven"
    SAMPLED = "sampled"
    UNKNOWN = "unknown"
    FAILED = "failed"

    @property
    def strength(self) -> int:
        return _STRENGTH[self]

    def __str__(self):
        return self.value


_STRENGTH = {Grade.PROVEN: 3, Grade.SAMPLED: 2, Grade.UNKNOWN: 1, Grade.FAILED: 0}


def weakest(grades) -> Grade:
    """Combine grades; an empty collection counts as PROVEN (nothing to doubt)."""
    result = Grade.PROVEN
    for g in grades:
        if g.strength < result.strength:
            result = g
    return result
