"""
Moments and free cumulants.

Moment series M (constant term 1) and cumulant series K (constant term 0)
are linked by the functional equation

    M(x) = 1 + K(x M(x)) = 1 + (K ≺ M)(x).

Cumulant series are tagged with the y variable: K(y) = M(x) − 1 under the
change of variables yᵢ = xᵢ M(x).
"""

from __future__ import annotations

import itertools
import logging

from planarcalc.exceptions import ConstantTermError
from planarcalc.products import prec
from planarcalc.reports import IdentityReport, Violation, combine, compare_series
from planarcalc.series import (
    Alphabet,
    Field,
    Scalar,
    Series,
    Word,
    add,
    cauchy_product,
    compose,
    from_terms,
    in_g0,
    in_g1,
    integral_field,
    invert_field,
    left_derivative,
    make_series,
    one,
    one_scalar,
    scalars_close,
    zero_scalar,
)

logger = logging.getLogger(__name__)

# The displayed low-degree moment/cumulant relations stop at degree 4.
ORACLE_DEGREE = 4

MomentSeries = Series
CumulantSeries = Series


def check_moments(moments: Series) -> Series:
    if not in_g1(moments):
        raise ConstantTermError(
            f"a moment series has constant term 1, got {moments.constant_term}"
        )
    return moments


def check_cumulants(cumulants: Series) -> Series:
    if not in_g0(cumulants):
        raise ConstantTermError(
            f"a cumulant series has constant term 0, got {cumulants.constant_term}"
        )
    return cumulants


def is_centered(cumulants: Series) -> bool:
    return in_g0(cumulants) and not cumulants.homogeneous(1)


def cumulants_from_moments(moments: MomentSeries) -> CumulantSeries:
    """
    Solve M = 1 + K ≺ M for K one degree at a time.

    With M₀ = 1 the degree-d part of K ≺ M is k_d plus terms coming from
    cumulants of lower degree, so k_d = m_d − [K_{<d} ≺ M]_d.
    """
    check_moments(moments)
    alphabet, max_degree, kind = moments.alphabet, moments.max_degree, moments.scalar
    terms: dict[Word, Scalar] = {}
    for d in range(1, max_degree + 1):
        lower = from_terms(alphabet, max_degree, terms, kind)
        shifted = prec(lower, moments).homogeneous(d)
        zero_value = zero_scalar(kind)
        for word in alphabet.words(d):
            value = moments.coeffs.get(word, zero_value) - shifted.get(word, zero_value)
            if value != 0:
                terms[word] = value
        logger.debug("cumulants_from_moments degree %d solved", d)
    return from_terms(alphabet, max_degree, terms, kind, "y")


def moments_from_cumulants(cumulants: CumulantSeries) -> MomentSeries:
    """Iterate M ← 1 + K ≺ M from M = 1; each pass fixes one more degree."""
    check_cumulants(cumulants)
    k = cumulants.retag("x")
    unit = one(k.alphabet, k.max_degree, k.scalar)
    moments = unit
    for step in range(k.max_degree):
        updated = add(unit, prec(k, moments))
        if updated == moments:
            logger.debug("moments_from_cumulants stabilised after %d passes", step)
            break
        moments = updated
    return moments


def y_field(moments: MomentSeries) -> Field:
    """The change of variables yᵢ = xᵢ M(x)."""
    check_moments(moments)
    return integral_field(moments.retag("x"))


def x_in_y(moments: MomentSeries) -> Field:
    """The inverse change of variables: each xᵢ as a series in the y letters."""
    return invert_field(y_field(moments), variable="y")


def rewrite_in_y(f: Series, moments: MomentSeries) -> Series:
    """f^M with f^M(y(x)) = f(x)."""
    return compose(f.retag("x"), x_in_y(moments))


# ── identity checks ────────────────────────────────────────────────────────


def functional_equation_check(
    moments: MomentSeries, cumulants: CumulantSeries, tolerance: float | None = None
) -> IdentityReport:
    """M = 1 + K ≺ M."""
    unit = one(moments.alphabet, moments.max_degree, moments.scalar)
    rhs = add(unit, prec(cumulants.retag("x"), moments))
    return compare_series("functional_equation", moments, rhs, tolerance=tolerance)


def _first_block_expansion(word: Word, moments: Series, cumulants: Series) -> Scalar:
    # Sum over the block containing the first position: k(block) · Π m(gaps).
    kind = moments.scalar
    total = zero_scalar(kind)
    rest = range(1, len(word))
    for size in range(len(word)):
        for chosen in itertools.combinations(rest, size):
            positions = (0, *chosen)
            value = cumulants.coeffs.get(tuple(word[p] for p in positions), zero_scalar(kind))
            if value == 0:
                continue
            bounds = (*positions, len(word))
            for start, stop in zip(bounds, bounds[1:]):
                gap = word[start + 1 : stop]
                value *= moments.coeffs.get(gap, zero_scalar(kind)) if gap else one_scalar(kind)
            total += value
    return total


def lowdegree_oracle_check(
    moments: MomentSeries, cumulants: CumulantSeries, tolerance: float | None = None
) -> IdentityReport:
    """
    Check the classical moment/cumulant relations up to degree 4.

    Each m_w is rebuilt from the block of the first letter and the moments of
    the gaps it leaves, independently of ``cumulants_from_moments``.
    """
    degree = min(ORACLE_DEGREE, moments.max_degree, cumulants.max_degree)
    report = IdentityReport("lowdegree_oracle", degree)
    if not scalars_close(moments.constant_term, one_scalar(moments.scalar), tolerance):
        report.violations.append(Violation((), moments.constant_term, one_scalar(moments.scalar)))
    zero_value = zero_scalar(moments.scalar)
    for d in range(1, degree + 1):
        for word in moments.alphabet.words(d):
            lhs = moments.coeffs.get(word, zero_value)
            rhs = _first_block_expansion(word, moments, cumulants)
            if not scalars_close(lhs, rhs, tolerance):
                report.violations.append(Violation(word, lhs, rhs))
    return report


def derivative_identity_check(
    f: Series, moments: MomentSeries, tolerance: float | None = None
) -> IdentityReport:
    """∂ᵢf = M · (∂f^M/∂yᵢ)(y(x)) for every letter."""
    f = f.retag("x")
    rewritten = rewrite_in_y(f, moments)
    change = y_field(moments)
    reports = [
        compare_series(
            "derivative_identity",
            left_derivative(f, i),
            cauchy_product(moments, compose(left_derivative(rewritten, i), change)),
            tolerance=tolerance,
            context=f"i={i}",
        )
        for i in f.alphabet.letters
    ]
    return combine("derivative_identity", reports)


def rewrite_agreement_check(
    moments: MomentSeries, tolerance: float | None = None
) -> IdentityReport:
    """rewrite_in_y(M − 1, M) must reproduce cumulants_from_moments(M)."""
    unit = one(moments.alphabet, moments.max_degree, moments.scalar)
    rewritten = rewrite_in_y(add(moments, -unit), moments)
    return compare_series(
        "rewrite_agreement", rewritten, cumulants_from_moments(moments), tolerance=tolerance
    )


def semicircle_moments(max_degree: int) -> MomentSeries:
    """Moments of a single standard semicircular variable (Catalan numbers at even degree)."""
    entries = [((1,) * (2 * k), _catalan(k)) for k in range(max_degree // 2 + 1)]
    return make_series(entries, Alphabet(1), max_degree)


def _catalan(k: int) -> int:
    value = 1
    for j in range(k):
        value = value * 2 * (2 * j + 1) // (j + 2)
    return value

