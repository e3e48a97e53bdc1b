"""
Identity reports returned by every verifier.

Verifiers never raise on a failed identity; they collect the offending
coefficients here and leave the decision to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from planarcalc.series import Scalar, Series, Word, scalars_close, truncate, zero_scalar


def format_scalar(value: Scalar) -> str | float:
    """Rationals as canonical "p/q" strings, floats unchanged."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)


@dataclass(frozen=True)
class Violation:
    word: Word
    lhs: Scalar
    rhs: Scalar
    context: str = ""

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "word": list(self.word),
            "lhs": format_scalar(self.lhs),
            "rhs": format_scalar(self.rhs),
        }
        if self.context:
            doc["context"] = self.context
        return doc


@dataclass
class IdentityReport:
    identity: str
    max_checked_degree: int
    violations: list[Violation] = field(default_factory=list)
    printed_discrepancies: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_violating_degree(self) -> int | None:
        return max((len(v.word) for v in self.violations), default=None)

    def extend(self, other: IdentityReport) -> None:
        self.violations.extend(other.violations)
        self.printed_discrepancies.extend(other.printed_discrepancies)
        self.max_checked_degree = max(self.max_checked_degree, other.max_checked_degree)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "identity": self.identity,
            "max_checked_degree": self.max_checked_degree,
            "violations": [v.to_dict() for v in self.violations],
        }
        if self.printed_discrepancies:
            doc["printed_discrepancies"] = self.printed_discrepancies
        return doc


def compare_series(
    identity: str,
    lhs: Series,
    rhs: Series,
    *,
    tolerance: float | None = None,
    context: str = "",
    degree: int | None = None,
) -> IdentityReport:
    """
    Coefficient-wise comparison of two series at their common precision.

    ``degree`` lowers the comparison degree further. Exact comparison unless a
    ``tolerance`` is given (float data).
    """
    checked = min(lhs.max_degree, rhs.max_degree)
    if degree is not None:
        checked = min(checked, degree)
    left, right = truncate(lhs, checked), truncate(rhs, checked)
    report = IdentityReport(identity, checked)
    zero_value = zero_scalar(lhs.scalar)
    for word in sorted(set(left.coeffs) | set(right.coeffs), key=lambda w: (len(w), w)):
        a = left.coeffs.get(word, zero_value)
        b = right.coeffs.get(word, zero_value)
        if not scalars_close(a, b, tolerance):
            report.violations.append(Violation(word, a, b, context))
    return report


def combine(identity: str, reports: list[IdentityReport]) -> IdentityReport:
    merged = IdentityReport(identity, 0)
    for report in reports:
        merged.extend(report)
    return merged
