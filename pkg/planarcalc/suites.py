"""
Seeded property suites behind ``planarcalc verify``.

Each suite draws ``instances`` random inputs and runs the matching verifiers
on each. Instance k draws from the k-th child of ``SeedSequence(seed)``, so
the reports depend only on (suite, seed, alphabet, degree, scalar) and never
on the worker count.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from planarcalc.cumulants import (
    cumulants_from_moments,
    derivative_identity_check,
    functional_equation_check,
    lowdegree_oracle_check,
    moments_from_cumulants,
    rewrite_agreement_check,
)
from planarcalc.effective_action import (
    effective_action,
    is_regular,
    univariate_cumulants,
    univariate_relation_check,
    verify_convention_identity,
    verify_cumulant_identity,
    verify_legendre,
    verify_moment_identity,
    verify_three_point,
    verify_two_point,
)
from planarcalc.exceptions import ConfigError, PreconditionError
from planarcalc.parallel import ParallelRunner
from planarcalc.products import (
    bullet,
    bullet_inverse,
    derivative_rules_check,
    distributivity_check,
    lie_bracket,
    moment_derivative_check,
    prec,
    prelie,
    succ,
    univariate_conjugation_check,
)
from planarcalc.reports import IdentityReport, combine, compare_series
from planarcalc.series import (
    RATIONAL,
    Alphabet,
    Field,
    Scalar,
    Series,
    add,
    cauchy_product,
    compose,
    compose_field,
    identity_field,
    invert_field,
    left_derivative,
    make_series,
    negate,
    one,
    scale,
    sum_series,
)
from planarcalc.trees import verify_theorem

logger = logging.getLogger(__name__)

UNIVARIATE_ORDERS = range(2, 7)
THEOREM_MAX_WORD = 5


@dataclass(frozen=True)
class SuiteParams:
    alphabet: int
    degree: int
    scalar: str = RATIONAL
    tolerance: float | None = None


# ── random instances ───────────────────────────────────────────────────────


def random_scalar(rng: np.random.Generator, kind: str = RATIONAL) -> Scalar:
    """A small nonzero p/q with |p| ≤ 3 and 1 ≤ q ≤ 3, as a float in float64 runs."""
    numerator = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
    value = Fraction(numerator, int(rng.integers(1, 4)))
    return value if kind == RATIONAL else float(value)


def random_series(
    rng: np.random.Generator,
    params: SuiteParams,
    *,
    min_degree: int = 1,
    constant: object | None = None,
    density: float = 0.5,
    variable: str = "x",
) -> Series:
    """
    Sparse random series: each word of degree ≥ ``min_degree`` is present
    with probability ``density``; ``constant`` fixes the constant term.
    """
    alphabet = Alphabet(params.alphabet)
    entries: list[tuple[tuple[int, ...], object]] = []
    if constant is not None:
        entries.append(((), constant))
    for degree in range(min_degree, params.degree + 1):
        for word in alphabet.words(degree):
            if rng.random() < density:
                entries.append((word, random_scalar(rng, params.scalar)))
    return make_series(entries, alphabet, params.degree, scalar=params.scalar, variable=variable)


def random_unit(rng: np.random.Generator, params: SuiteParams) -> Series:
    """A random element of the group: constant term 1."""
    return random_series(rng, params, constant=1)


def random_moments(rng: np.random.Generator, params: SuiteParams) -> Series:
    return random_series(rng, params, constant=1)


def random_regular_cumulants(rng: np.random.Generator, params: SuiteParams) -> Series:
    """Centered cumulants with a nonsingular covariance block."""
    alphabet = Alphabet(params.alphabet)
    while True:
        covariance = [
            (word, random_scalar(rng, params.scalar))
            for word in alphabet.words(2)
            if word[0] == word[1] or rng.random() < 0.5
        ]
        higher = random_series(rng, params, min_degree=3, variable="y")
        entries = covariance + list(higher.coeffs.items())
        k = make_series(entries, alphabet, params.degree, scalar=params.scalar, variable="y")
        if is_regular(k):
            return k


def random_invertible_field(rng: np.random.Generator, params: SuiteParams) -> Field:
    """Identity letters plus random terms of degree ≥ 2."""
    letters = identity_field(Alphabet(params.alphabet), params.degree, params.scalar)
    return Field(tuple(add(x, random_series(rng, params, min_degree=2)) for x in letters))


def random_constant_free_field(rng: np.random.Generator, params: SuiteParams) -> Field:
    return Field(tuple(random_series(rng, params) for _ in range(params.alphabet)))


# ── per-instance checks ────────────────────────────────────────────────────


def _series_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    tol = params.tolerance
    f, g, h = (random_series(rng, params, min_degree=0) for _ in range(3))
    outer = random_series(rng, params, min_degree=0)
    inner = random_constant_free_field(rng, params)
    innermost = random_constant_free_field(rng, params)
    reports = [
        compare_series(
            "cauchy_associativity",
            cauchy_product(cauchy_product(f, g), h),
            cauchy_product(f, cauchy_product(g, h)),
            tolerance=tol,
        ),
        compare_series(
            "composition_associativity",
            compose(compose(outer, inner), innermost),
            compose(outer, compose_field(inner, innermost)),
            tolerance=tol,
        ),
    ]

    leibniz, chain = [], []
    for i in f.alphabet.letters:
        leibniz.append(
            compare_series(
                "planar_leibniz",
                left_derivative(cauchy_product(f, g), i),
                add(
                    cauchy_product(left_derivative(f, i), g),
                    scale(f.constant_term, left_derivative(g, i)),
                ),
                tolerance=tol,
                context=f"i={i}",
            )
        )
        terms = [
            cauchy_product(left_derivative(inner[j], i), compose(left_derivative(outer, j), inner))
            for j in f.alphabet.letters
        ]
        chain.append(
            compare_series(
                "chain_rule",
                left_derivative(compose(outer, inner), i),
                sum_series(terms, terms[0]),
                tolerance=tol,
                context=f"i={i}",
            )
        )
    reports += [combine("planar_leibniz", leibniz), combine("chain_rule", chain)]

    field = random_invertible_field(rng, params)
    inverse = invert_field(field)
    letters = identity_field(field.alphabet, field.max_degree, field.scalar)
    inversion = []
    pairs = (("g(psi)", compose_field(field, inverse)), ("psi(g)", compose_field(inverse, field)))
    for label, composed in pairs:
        for i, (lhs, rhs) in enumerate(zip(composed, letters), start=1):
            inversion.append(
                compare_series("field_inversion", lhs, rhs, tolerance=tol, context=f"{label} i={i}")
            )
    reports.append(combine("field_inversion", inversion))
    return reports


def _cumulants_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    tol = params.tolerance
    moments = random_moments(rng, params)
    cumulants = cumulants_from_moments(moments)
    f = random_series(rng, params, min_degree=0)
    return [
        compare_series(
            "moment_cumulant_round_trip",
            moments_from_cumulants(cumulants),
            moments,
            tolerance=tol,
        ),
        functional_equation_check(moments, cumulants, tol),
        lowdegree_oracle_check(moments, cumulants, tol),
        rewrite_agreement_check(moments, tol),
        moment_derivative_check(moments, cumulants, tol),
        derivative_identity_check(f, moments, tol),
    ]


def _products_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    tol = params.tolerance
    f, g, h = (random_unit(rng, params) for _ in range(3))
    a, b, c = (random_series(rng, params) for _ in range(3))
    unit = one(f.alphabet, f.max_degree, f.scalar)

    reports = [
        compare_series(
            "bullet_associativity",
            bullet(bullet(f, g), h),
            bullet(f, bullet(g, h)),
            tolerance=tol,
        ),
        combine(
            "bullet_inverse",
            [
                compare_series("bullet_inverse", bullet(f, bullet_inverse(f)), unit, tolerance=tol),
                compare_series("bullet_inverse", bullet(bullet_inverse(f), f), unit, tolerance=tol),
            ],
        ),
        compare_series(
            "half_product_split", bullet(a, g), add(prec(a, g), succ(a, g)), tolerance=tol
        ),
        compare_series(
            "module_law", prec(a, bullet(g, h)), prec(prec(a, g), h), tolerance=tol
        ),
        distributivity_check(f, a, b, g, tol),
        derivative_rules_check(a, g, tol),
    ]

    def associator(x: Series, y: Series, z: Series) -> Series:
        return add(prelie(prelie(x, y), z), negate(prelie(x, prelie(y, z))))

    reports.append(
        compare_series("prelie_identity", associator(a, b, c), associator(a, c, b), tolerance=tol)
    )
    jacobi = [
        lie_bracket(a, lie_bracket(b, c)),
        lie_bracket(b, lie_bracket(c, a)),
        lie_bracket(c, lie_bracket(a, b)),
    ]
    total = sum_series(jacobi, jacobi[0])
    reports.append(compare_series("jacobi", total, scale(0, total), tolerance=tol))
    if params.alphabet == 1:
        reports.append(univariate_conjugation_check(a, g))
    return reports


def _legendre_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    tol = params.tolerance
    cumulants = random_regular_cumulants(rng, params)
    action = effective_action(cumulants)
    return [
        verify_legendre(cumulants, action, tol),
        verify_cumulant_identity(cumulants, action, tol),
        verify_convention_identity(cumulants, action, tol),
        verify_moment_identity(moments_from_cumulants(cumulants), tol),
    ]


def _two_point_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    cumulants = random_regular_cumulants(rng, params)
    return [verify_two_point(cumulants, effective_action(cumulants), params.tolerance)]


def _three_point_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    cumulants = random_regular_cumulants(rng, params)
    return [verify_three_point(cumulants, effective_action(cumulants), params.tolerance)]


def theorem_window(degree: int) -> tuple[int, int]:
    """Longest word length and y-degree checked at truncation ``degree``."""
    n_max = min(THEOREM_MAX_WORD, degree - 1)
    if n_max < 2:
        raise PreconditionError("the tree expansion suite needs degree >= 3")
    return n_max, degree - n_max


def _theorem_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    cumulants = random_regular_cumulants(rng, params)
    n_max, degree = theorem_window(params.degree)
    return [
        verify_theorem(
            cumulants, effective_action(cumulants), n_max, degree, tolerance=params.tolerance
        )
    ]


def _univariate_instance(params: SuiteParams, rng: np.random.Generator) -> list[IdentityReport]:
    orders = [n for n in UNIVARIATE_ORDERS if n <= params.degree]
    values = {n: random_scalar(rng, params.scalar) for n in range(2, max(orders) + 1)}
    cumulants = univariate_cumulants(values, params.degree)
    return [univariate_relation_check(cumulants, n, params.tolerance) for n in orders]


Instance = Callable[[SuiteParams, np.random.Generator], list[IdentityReport]]

SUITES: dict[str, Instance] = {
    "series": _series_instance,
    "cumulants": _cumulants_instance,
    "products": _products_instance,
    "legendre": _legendre_instance,
    "two-point": _two_point_instance,
    "three-point": _three_point_instance,
    "theorem": _theorem_instance,
    "univariate": _univariate_instance,
}

DEFAULT_INSTANCES: dict[str, int] = {
    "series": 10,
    "cumulants": 10,
    "products": 10,
    "legendre": 5,
    "two-point": 5,
    "three-point": 3,
    "theorem": 2,
    "univariate": 5,
}


# ── runner ─────────────────────────────────────────────────────────────────


def _run_instance(
    check: Instance, params: SuiteParams, stream: np.random.SeedSequence
) -> list[IdentityReport]:
    return check(params, np.random.default_rng(stream))


def run_suite(
    name: str,
    *,
    seed: int,
    alphabet: int,
    degree: int,
    instances: int | None = None,
    scalar: str = RATIONAL,
    tolerance: float | None = None,
    workers: int = 1,
) -> list[IdentityReport]:
    """
    Run one suite and merge the reports of every instance per identity.

    The univariate suite always uses a one-letter alphabet.
    """
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    count = DEFAULT_INSTANCES[name] if instances is None else instances
    if count < 1:
        raise ConfigError(f"instances must be >= 1, got {count}")
    if name == "univariate":
        alphabet = 1
        if degree < 2:
            raise PreconditionError("the univariate suite needs degree >= 2")
    if name == "three-point" and degree < 3:
        raise PreconditionError("the three-point suite needs degree >= 3")
    if name == "theorem":
        theorem_window(degree)
    params = SuiteParams(alphabet, degree, scalar, tolerance)

    streams = np.random.SeedSequence(seed).spawn(count)
    with ParallelRunner(workers) as runner:
        per_instance = runner.map(partial(_run_instance, SUITES[name], params), streams)
    logger.debug("suite %s: %d instances done", name, count)

    grouped: dict[str, list[IdentityReport]] = {}
    for reports in per_instance:
        for report in reports:
            grouped.setdefault(report.identity, []).append(report)
    return [combine(identity, reports) for identity, reports in grouped.items()]


def suite_document(
    name: str, reports: list[IdentityReport], **settings: object
) -> dict[str, object]:
    return {
        "suite": name,
        **settings,
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
