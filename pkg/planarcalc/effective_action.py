"""
Conjugate field, covariance and the non-commutative Legendre transform.

For a centered cumulant series K(y) the conjugate field is φᵢ = ∂K/∂yᵢ.
When the covariance matrix (the degree-2 cumulants) is invertible the field
can be reversed, giving y as a series Ψ(φ), and the effective action is

    L(φ) = Σᵢ φᵢ Ψᵢ(φ),     so that ∂L/∂φᵢ = Ψᵢ.

Its coefficients are the 1PI coefficients ℓ. Verifiers in this module express
every L-derivative in the y letters (by composing with Φ) before comparing.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Sequence
from dataclasses import dataclass, field

from planarcalc.cumulants import check_cumulants, cumulants_from_moments, is_centered, y_field
from planarcalc.exceptions import (
    InconsistentPairError,
    NotCenteredError,
    NotRegularError,
    PreconditionError,
    SingularLinearPartError,
)
from planarcalc.reports import IdentityReport, Violation, combine, compare_series, format_scalar
from planarcalc.series import (
    Alphabet,
    Field,
    Scalar,
    Series,
    Word,
    add,
    cauchy_product,
    coefficient,
    compose,
    compose_field,
    differential_field,
    identity_field,
    in_g0,
    invert_field,
    invert_matrix,
    iterated_derivative,
    left_derivative,
    letter,
    make_series,
    negate,
    one,
    prefix_letter,
    scalars_close,
    sum_series,
    zero,
    zero_scalar,
)

logger = logging.getLogger(__name__)


# ── covariance ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CovarianceMatrix:
    """The matrix of degree-2 cumulants k⁽²⁾ᵢⱼ."""

    entries: tuple[tuple[Scalar, ...], ...]
    scalar: str

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: tuple[int, int]) -> Scalar:
        """Entry for the 1-based letter pair (i, j)."""
        i, j = index
        return self.entries[i - 1][j - 1]

    def inverse(self) -> list[list[Scalar]]:
        return invert_matrix([list(row) for row in self.entries], self.scalar)

    def is_invertible(self) -> bool:
        try:
            self.inverse()
        except SingularLinearPartError:
            return False
        return True

    def to_lists(self) -> list[list[str | float]]:
        return [[format_scalar(v) for v in row] for row in self.entries]


def covariance(cumulants: Series) -> CovarianceMatrix:
    letters = cumulants.alphabet.letters
    zero_value = zero_scalar(cumulants.scalar)
    entries = tuple(
        tuple(cumulants.coeffs.get((i, j), zero_value) for j in letters) for i in letters
    )
    return CovarianceMatrix(entries, cumulants.scalar)


def conjugate_field(cumulants: Series) -> Field:
    """Φ = (∂K/∂y₁, …, ∂K/∂yₙ) for a centered cumulant series."""
    check_cumulants(cumulants)
    if not is_centered(cumulants):
        raise NotCenteredError("cumulant series has nonzero degree-1 coefficients")
    return differential_field(cumulants.retag("y"))


def is_regular(cumulants: Series) -> bool:
    return (
        in_g0(cumulants)
        and is_centered(cumulants)
        and cumulants.max_degree >= 2
        and covariance(cumulants).is_invertible()
    )


# ── effective action ───────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class EffectiveAction:
    """
    L(φ) together with the fields it was built from.

    ``conjugate`` is Φ(y) and ``legendre`` is Ψ(φ), y written in the φ letters.
    """

    series: Series
    covariance: CovarianceMatrix
    conjugate: Field
    legendre: Field
    _vertices: dict[Word, Series] = field(default_factory=dict, init=False, repr=False)
    # guards _vertices when suites share one action across worker threads
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    @property
    def alphabet(self) -> Alphabet:
        return self.series.alphabet

    @property
    def max_degree(self) -> int:
        return self.series.max_degree

    @property
    def scalar(self) -> str:
        return self.series.scalar

    def coefficient(self, word: Word) -> Scalar:
        return l_coefficient(self, word)

    def derivative(self, word: Word) -> Series:
        """L(Φ)_{φ_{i₁}…φ_{i_k}} as a series in φ."""
        return iterated_derivative(self.series, word)

    def in_y(self, f: Series) -> Series:
        """A φ-series rewritten in the y letters through Φ."""
        return compose(f, self.conjugate)

    def vertex(self, word: Word) -> Series:
        """L(Φ)_{φ_w} expressed in y; memoised per word."""
        with self._lock:
            if word not in self._vertices:
                self._vertices[word] = self.in_y(self.derivative(word))
            return self._vertices[word]


def effective_action(cumulants: Series) -> EffectiveAction:
    """Legendre transform of a regular cumulant series."""
    check_cumulants(cumulants)
    if not is_centered(cumulants):
        raise NotCenteredError("cumulant series has nonzero degree-1 coefficients")
    if not is_regular(cumulants):
        raise NotRegularError("covariance matrix of the cumulant series is singular")
    phi = conjugate_field(cumulants)
    psi = invert_field(phi, variable="phi")
    series = sum_series(
        (prefix_letter(i, component) for i, component in zip(phi.alphabet.letters, psi)),
        prefix_letter(1, psi.components[0]),
    ).retag("phi")
    logger.info(
        "effective action built: %d letters, degree %d, %d coefficients",
        series.alphabet.size,
        series.max_degree,
        len(series),
    )
    return EffectiveAction(series, covariance(cumulants), phi, psi)


def l_coefficient(action: EffectiveAction | Series, word: Word) -> Scalar:
    """ℓ_w, the coefficient of φ_w in L."""
    series = action.series if isinstance(action, EffectiveAction) else action
    return coefficient(series, word)


def check_pair(cumulants: Series, action: EffectiveAction) -> None:
    if action.alphabet != cumulants.alphabet or action.conjugate != conjugate_field(cumulants):
        raise InconsistentPairError("effective action was not built from this cumulant series")


# ── Legendre identities ────────────────────────────────────────────────────


def verify_legendre(
    cumulants: Series, action: EffectiveAction, tolerance: float | None = None
) -> IdentityReport:
    """∂L ∘ ∂K = y and ∂K ∘ ∂L = φ, component by component."""
    check_pair(cumulants, action)
    d_l = differential_field(action.series)
    d_k = action.conjugate
    reports = []
    composed_pairs = (("dL(dK)", compose_field(d_l, d_k)), ("dK(dL)", compose_field(d_k, d_l)))
    for label, composed in composed_pairs:
        letters = identity_field(composed.alphabet, composed.max_degree, composed.scalar)
        for i, (lhs, rhs) in enumerate(zip(composed, letters), start=1):
            reports.append(
                compare_series("legendre", lhs, rhs, tolerance=tolerance, context=f"{label} i={i}")
            )
    return combine("legendre", reports)


def _kronecker(i: int, j: int, like: Series) -> Series:
    if i == j:
        return one(like.alphabet, like.max_degree, like.scalar, like.variable)
    return zero(like.alphabet, like.max_degree, like.scalar, like.variable)


def verify_two_point(
    cumulants: Series, action: EffectiveAction, tolerance: float | None = None
) -> IdentityReport:
    """
    Σₗ L_{φₗφⱼ} K_{yᵢyₗ} = δⱼᵢ and Σₗ K_{yₗyⱼ} L_{φᵢφₗ} = δⱼᵢ as y-series.

    The degree-0 part is the statement that the quadratic coefficients of L
    invert the covariance matrix.
    """
    check_pair(cumulants, action)
    k = cumulants.retag("y")
    letters = list(k.alphabet.letters)
    two = {(a, b): iterated_derivative(k, (a, b)) for a in letters for b in letters}
    reports = []
    for i in letters:
        for j in letters:
            first = sum_series(
                (cauchy_product(action.vertex((m, j)), two[i, m]) for m in letters), two[i, j]
            )
            second = sum_series(
                (cauchy_product(two[m, j], action.vertex((i, m))) for m in letters), two[i, j]
            )
            reports.append(
                compare_series(
                    "two_point", first, _kronecker(i, j, first), tolerance=tolerance,
                    context=f"LK i={i} j={j}",
                )
            )
            reports.append(
                compare_series(
                    "two_point", second, _kronecker(i, j, second), tolerance=tolerance,
                    context=f"KL i={i} j={j}",
                )
            )
    return combine("two_point", reports)


def verify_three_point(
    cumulants: Series, action: EffectiveAction, tolerance: float | None = None
) -> IdentityReport:
    """
    ∂(K_{y_p y_j})/∂φ_k = −Σ k⁽²⁾ₗⱼ L_{φᵢφₗφ_k} K_{y_p yᵢ} in the y letters.

    The left side is computed directly: K_{y_p y_j} is rewritten in φ through
    Ψ, differentiated by φ_k, and brought back to y through Φ.
    """
    check_pair(cumulants, action)
    if cumulants.max_degree < 3:
        raise PreconditionError("the three-point identity needs max_degree >= 3")
    k = cumulants.retag("y")
    letters = list(k.alphabet.letters)
    cov = action.covariance
    two = {(a, b): iterated_derivative(k, (a, b)) for a in letters for b in letters}
    reports = []
    for p in letters:
        for j in letters:
            in_phi = compose(two[p, j], action.legendre)
            for kk in letters:
                lhs = action.in_y(left_derivative(in_phi, kk))
                terms = [
                    cauchy_product(action.vertex((i, m, kk)), two[p, i]) * cov[m, j]
                    for m in letters
                    for i in letters
                    if cov[m, j] != 0
                ]
                rhs = negate(sum_series(terms, lhs))
                reports.append(
                    compare_series(
                        "three_point", lhs, rhs, tolerance=tolerance,
                        context=f"p={p} j={j} k={kk}",
                    )
                )
    return combine("three_point", reports)


def verify_cumulant_identity(
    cumulants: Series, action: EffectiveAction | None = None, tolerance: float | None = None
) -> IdentityReport:
    """K(y) = Σᵢ yᵢ φᵢ."""
    phi = action.conjugate if action is not None else conjugate_field(cumulants)
    rhs = sum_series(
        (prefix_letter(i, component) for i, component in zip(phi.alphabet.letters, phi)),
        prefix_letter(1, phi.components[0]),
    )
    return compare_series("cumulant_identity", cumulants.retag("y"), rhs, tolerance=tolerance)


def verify_moment_identity(moments: Series, tolerance: float | None = None) -> IdentityReport:
    """M(x) = 1 + Σᵢ xᵢ M(x) φᵢ(y(x))."""
    cumulants = cumulants_from_moments(moments)
    phi = differential_field(cumulants)
    change = y_field(moments)
    terms = [
        prefix_letter(i, cauchy_product(moments, compose(component, change)))
        for i, component in zip(moments.alphabet.letters, phi)
    ]
    rhs = add(one(moments.alphabet, moments.max_degree, moments.scalar), sum_series(terms, moments))
    return compare_series("moment_identity", moments, rhs, tolerance=tolerance)


def verify_convention_identity(
    cumulants: Series, action: EffectiveAction, tolerance: float | None = None
) -> IdentityReport:
    """L(Φ(y)) + K(y) = Σᵢ φᵢ yᵢ + Σᵢ yᵢ φᵢ, all in y."""
    check_pair(cumulants, action)
    k = cumulants.retag("y")
    phi = action.conjugate
    lhs = add(action.in_y(action.series), k)
    right_letters = (
        cauchy_product(component, letter(i, k.alphabet, k.max_degree, k.scalar, "y"))
        for i, component in zip(k.alphabet.letters, phi)
    )
    left_letters = (prefix_letter(i, component) for i, component in zip(k.alphabet.letters, phi))
    rhs = add(sum_series(right_letters, lhs), sum_series(left_letters, lhs))
    return compare_series("convention_identity", lhs, rhs, tolerance=tolerance)


# ── univariate relations ───────────────────────────────────────────────────

# (coefficient, vertex arities) stands for coefficient · ℓ(a₁) k⁽²⁾ ℓ(a₂) k⁽²⁾ ….
RelationTerms = Sequence[tuple[int, tuple[int, ...]]]

# Right-hand sides of the univariate relations as printed, keyed by order.
PRINTED_RELATIONS: dict[int, RelationTerms] = {
    3: ((-1, (3,)),),
    4: ((-1, (4,)), (2, (3, 3))),
    5: ((-1, (5,)), (-5, (4, 3))),
    6: ((-1, (6,)), (6, (5, 3)), (6, (4, 4)), (-14, (3, 3, 3))),
}


def render_relation(terms: RelationTerms) -> str:
    parts = []
    for coefficient_value, arities in terms:
        body = " k(2) ".join(f"l({a})" for a in arities)
        sign = "-" if coefficient_value < 0 else "+"
        magnitude = abs(coefficient_value)
        parts.append(f"{sign} {body}" if magnitude == 1 else f"{sign} {magnitude} {body}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _relation_value(
    terms: RelationTerms, ell: dict[int, Scalar], k2: Scalar, kind: str
) -> Scalar:
    total = zero_scalar(kind)
    for coefficient_value, arities in terms:
        value = coefficient_value * k2 ** (len(arities) - 1)
        for a in arities:
            value *= ell[a]
        total += value
    return total


def univariate_relation_check(
    cumulants: Series, order: int, tolerance: float | None = None
) -> IdentityReport:
    """
    k⁽ⁿ⁾ (k⁽²⁾)⁻ⁿ against its expansion in 1PI coefficients, for one cumulant series.

    The tree-derived relation must hold; where the printed coefficient set
    differs from it, both are recorded under ``printed_discrepancies``.
    """
    # trees builds on this module, so the table is imported on use
    from planarcalc.trees import univariate_tree_table

    if cumulants.alphabet.size != 1:
        raise PreconditionError("univariate relations need a one-letter alphabet")
    if not 2 <= order <= 6:
        raise PreconditionError(f"relations are tabulated for orders 2..6, got {order}")
    if cumulants.max_degree < order:
        raise PreconditionError(f"order {order} needs max_degree >= {order}")
    action = effective_action(cumulants)
    word = (1,) * order
    k2 = coefficient(cumulants, (1, 1))
    ell = {a: coefficient(action.series, (1,) * a) for a in range(2, order + 1)}
    report = IdentityReport(f"univariate_order{order}", order)

    if order == 2:
        lhs, rhs = ell[2], 1 / k2
        if not scalars_close(lhs, rhs, tolerance):
            report.violations.append(Violation(word, lhs, rhs, "derived"))
        return report

    lhs = coefficient(cumulants, word) / k2**order
    derived = univariate_tree_table(order)[order]
    derived_rhs = _relation_value(derived, ell, k2, cumulants.scalar)
    if not scalars_close(lhs, derived_rhs, tolerance):
        report.violations.append(Violation(word, lhs, derived_rhs, "derived"))

    printed = PRINTED_RELATIONS[order]
    if sorted(printed) != sorted(derived):
        report.printed_discrepancies.append(
            {
                "order": order,
                "printed": render_relation(printed),
                "derived": render_relation(derived),
                "lhs": format_scalar(lhs),
                "printed_rhs": format_scalar(_relation_value(printed, ell, k2, cumulants.scalar)),
                "derived_rhs": format_scalar(derived_rhs),
            }
        )
    return report


def univariate_cumulants(values: dict[int, object], max_degree: int) -> Series:
    """One-letter cumulant series from ``{order: k⁽order⁾}``."""
    return make_series(
        [((1,) * order, value) for order, value in values.items()],
        Alphabet(1),
        max_degree,
        variable="y",
    )

