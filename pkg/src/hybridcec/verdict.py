"""Unified engine verdicts.

Every proving engine reports one of three outcomes: the cone is constantly
zero (the pair is equivalent), a primary-input assignment driving the cone
root to 1 (a counterexample), or an exhausted resource budget.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Verdict:
    kind: str  # "equivalent" | "counterexample" | "resource_out"
    assignment: tuple[int, ...] | None = None  # one bit per PI position
    reason: str | None = None

    EQUIVALENT = "equivalent"
    COUNTEREXAMPLE = "counterexample"
    RESOURCE_OUT = "resource_out"

    @staticmethod
    def equivalent() -> "Verdict":
        return Verdict(Verdict.EQUIVALENT)

    @staticmethod
    def counterexample(assignment: tuple[int, ...]) -> "Verdict":
        return Verdict(Verdict.COUNTEREXAMPLE, assignment=assignment)

    @staticmethod
    def resource_out(reason: str) -> "Verdict":
        return Verdict(Verdict.RESOURCE_OUT, reason=reason)

    @property
    def is_equivalent(self) -> bool:
        return self.kind == Verdict.EQUIVALENT

    @property
    def is_counterexample(self) -> bool:
        return self.kind == Verdict.COUNTEREXAMPLE

    @property
    def is_resource_out(self) -> bool:
        return self.kind == Verdict.RESOURCE_OUT
