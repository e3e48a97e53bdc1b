"""
Shifted composition and its half-products.

For g with constant term 1:

    (f • g)(x) = g(x) · f(x g(x))
    (f ≺ g)(x) = f(x g(x))
    (f ≻ g)(x) = (g(x) − 1) · f(x g(x))

so that f • g = f ≺ g + f ≻ g. The pre-Lie product ◁ on constant-free
series is given by letter insertion.
"""

from __future__ import annotations

import logging

from planarcalc.exceptions import AlphabetMismatchError, ConstantTermError, PreconditionError
from planarcalc.reports import IdentityReport, combine, compare_series
from planarcalc.series import (
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
    left_derivative,
    negate,
    one,
    prefix_letter,
    zero_scalar,
)

logger = logging.getLogger(__name__)


def _require_unit(g: Series, name: str = "g") -> None:
    if not in_g1(g):
        raise ConstantTermError(f"{name} must have constant term 1, got {g.constant_term}")


def _require_constant_free(f: Series, name: str = "f") -> None:
    if not in_g0(f):
        raise ConstantTermError(f"{name} must have constant term 0, got {f.constant_term}")


def _shifted(f: Series, g: Series) -> Series:
    if f.alphabet != g.alphabet:
        raise AlphabetMismatchError("operands use different alphabets")
    return compose(f, integral_field(g))


def bullet(f: Series, g: Series) -> Series:
    """f • g = g · f(xg); defined for any f once g has constant term 1."""
    _require_unit(g)
    return cauchy_product(g, _shifted(f, g))


def bullet_inverse(f: Series) -> Series:
    """
    The •-inverse h with f • h = h • f = 1.

    The degree-d coefficient of f • h is h_d plus terms from lower degrees of
    h, so h is fixed one degree at a time.
    """
    _require_unit(f, "f")
    h = one(f.alphabet, f.max_degree, f.scalar, f.variable)
    for d in range(1, f.max_degree + 1):
        residual = bullet(f, h).homogeneous(d)
        if residual:
            correction = from_terms(f.alphabet, f.max_degree, residual, f.scalar, f.variable)
            h = add(h, negate(correction))
        logger.debug("bullet_inverse degree %d: %d corrections", d, len(residual))
    return h


def prec(f: Series, g: Series) -> Series:
    """f ≺ g = f(xg)."""
    _require_constant_free(f)
    _require_unit(g)
    return _shifted(f, g)


def succ(f: Series, g: Series) -> Series:
    """f ≻ g = (g − 1) · f(xg)."""
    _require_constant_free(f)
    _require_unit(g)
    g_minus_one = add(g, negate(one(g.alphabet, g.max_degree, g.scalar, g.variable)))
    return cauchy_product(g_minus_one, _shifted(f, g))


def prelie(a: Series, b: Series) -> Series:
    """Bilinear extension of u ◁ v = Σₖ u[:k] v u[k:] over the letter positions of u."""
    _require_constant_free(a, "a")
    _require_constant_free(b, "b")
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError("operands use different alphabets")
    if a.scalar != b.scalar:
        raise PreconditionError("operands use different scalar kinds")
    max_degree = min(a.max_degree, b.max_degree)
    terms: dict[Word, Scalar] = {}
    zero_value = zero_scalar(a.scalar)
    for u, x in a.coeffs.items():
        for v, y in b.coeffs.items():
            if len(u) + len(v) > max_degree:
                continue
            for k in range(len(u) + 1):
                word = u[:k] + v + u[k:]
                terms[word] = terms.get(word, zero_value) + x * y
    return from_terms(a.alphabet, max_degree, terms, a.scalar, a.variable)


def lie_bracket(a: Series, b: Series) -> Series:
    """[a, b] = a ◁ b − b ◁ a."""
    return add(prelie(a, b), negate(prelie(b, a)))


# ── identity checks ────────────────────────────────────────────────────────


def univariate_conjugation_check(f: Series, g: Series) -> IdentityReport:
    """x·(f • g) = (xf) ∘ (xg) over a single letter."""
    if f.alphabet.size != 1:
        raise PreconditionError("the conjugation identity is a one-letter statement")
    _require_unit(g)
    lhs = prefix_letter(1, bullet(f, g))
    rhs = compose(prefix_letter(1, f), Field((prefix_letter(1, g),)))
    return compare_series("univariate_conjugation", lhs, rhs)


def moment_derivative_check(
    moments: Series, cumulants: Series, tolerance: float | None = None
) -> IdentityReport:
    """∂ᵢM = (∂ᵢK) • M for every letter."""
    reports = [
        compare_series(
            "moment_derivative",
            left_derivative(moments, i),
            bullet(left_derivative(cumulants.retag(moments.variable), i), moments),
            tolerance=tolerance,
            context=f"i={i}",
        )
        for i in moments.alphabet.letters
    ]
    return combine("moment_derivative", reports)


def distributivity_check(
    f: Series, a: Series, b: Series, g: Series, tolerance: float | None = None
) -> IdentityReport:
    """
    Products distribute over the Cauchy product with ≺ on the right factor:

        (f a) • g = (f • g)(a ≺ g)
        (a b) ≺ g = (a ≺ g)(b ≺ g)
        (a b) ≻ g = (a ≻ g)(b ≺ g)

    ``a`` and ``b`` are constant-free, ``g`` has constant term 1.
    """
    a_prec = prec(a, g)
    reports = [
        compare_series(
            "distributivity",
            bullet(cauchy_product(f, a), g),
            cauchy_product(bullet(f, g), a_prec),
            tolerance=tolerance,
            context="bullet",
        ),
        compare_series(
            "distributivity",
            prec(cauchy_product(a, b), g),
            cauchy_product(a_prec, prec(b, g)),
            tolerance=tolerance,
            context="prec",
        ),
        compare_series(
            "distributivity",
            succ(cauchy_product(a, b), g),
            cauchy_product(succ(a, g), prec(b, g)),
            tolerance=tolerance,
            context="succ",
        ),
    ]
    return combine("distributivity", reports)


def derivative_rules_check(
    a: Series, g: Series, tolerance: float | None = None
) -> IdentityReport:
    """
    Left derivatives of the three products, for every letter i:

        ∂ᵢ(a • g) = (∂ᵢg)(a ≺ g) + (∂ᵢa) • g
        ∂ᵢ(a ≺ g) = (∂ᵢa) • g
        ∂ᵢ(a ≻ g) = (∂ᵢg)(a ≺ g)
    """
    a_prec = prec(a, g)
    reports = []
    for i in a.alphabet.letters:
        da, dg = left_derivative(a, i), left_derivative(g, i)
        da_bullet = bullet(da, g)
        pairs = (
            ("bullet", bullet(a, g), add(cauchy_product(dg, a_prec), da_bullet)),
            ("prec", a_prec, da_bullet),
            ("succ", succ(a, g), cauchy_product(dg, a_prec)),
        )
        for name, product, rhs in pairs:
            reports.append(
                compare_series(
                    "derivative_rules",
                    left_derivative(product, i),
                    rhs,
                    tolerance=tolerance,
                    context=f"{name} i={i}",
                )
            )
    return combine("derivative_rules", reports)
