"""Tests for the moment ↔ free cumulant transform."""
from __future__ import annotations

from fractions import Fraction

import pytest

from planarcalc.cumulants import (
    check_cumulants,
    cumulants_from_moments,
    derivative_identity_check,
    functional_equation_check,
    is_centered,
    lowdegree_oracle_check,
    moments_from_cumulants,
    rewrite_agreement_check,
    rewrite_in_y,
    semicircle_moments,
    x_in_y,
    y_field,
)
from planarcalc.effective_action import univariate_cumulants
from planarcalc.exceptions import ConstantTermError
from planarcalc.series import (
    FLOAT64,
    Alphabet,
    add,
    identity_field,
    make_series,
    one,
    series_close,
)
from planarcalc.suites import SuiteParams, random_moments, random_series


@pytest.fixture()
def two_letter_moments():
    return make_series(
        [
            ((), 1),
            ((1,), 1),
            ((2,), -1),
            ((1, 1), 2),
            ((1, 2), Fraction(1, 2)),
            ((2, 1), 3),
            ((1, 2, 1), -2),
            ((2, 2, 2, 1), Fraction(5, 3)),
        ],
        2,
        5,
    )


class TestSemicircle:
    def test_catalan_moments(self, semicircle):
        assert [semicircle[(1,) * k] for k in range(7)] == [1, 0, 1, 0, 2, 0, 5]

    def test_only_second_cumulant(self, semicircle, gaussian_cumulants):
        cumulants = cumulants_from_moments(semicircle)
        assert cumulants == gaussian_cumulants
        assert cumulants.variable == "y"

    def test_moments_from_gaussian(self, semicircle, gaussian_cumulants):
        assert moments_from_cumulants(gaussian_cumulants) == semicircle


class TestTransform:
    def test_low_degree_values(self):
        # m1 = a, m2 = b, m3 = c: k2 = b - a², k3 = c - 3ab + 2a³
        moments = make_series([((), 1), ((1,), 2), ((1, 1), 5), ((1, 1, 1), 7)], 1, 3)
        cumulants = cumulants_from_moments(moments)
        assert cumulants[(1,)] == 2
        assert cumulants[(1, 1)] == 1
        assert cumulants[(1, 1, 1)] == 7 - 3 * 2 * 5 + 2 * 8

    def test_noncommutative_second_cumulant(self, two_letter_moments):
        cumulants = cumulants_from_moments(two_letter_moments)
        # k(1,2) = m(1,2) - m(1) m(2)
        assert cumulants[(1, 2)] == Fraction(1, 2) + 1
        assert cumulants[(2, 1)] == 3 + 1

    def test_round_trip(self, two_letter_moments):
        cumulants = cumulants_from_moments(two_letter_moments)
        assert moments_from_cumulants(cumulants) == two_letter_moments

    def test_round_trip_random(self, rng):
        params = SuiteParams(3, 4)
        for _ in range(5):
            moments = random_moments(rng, params)
            assert moments_from_cumulants(cumulants_from_moments(moments)) == moments

    def test_float_round_trip(self):
        moments = make_series([((), 1.0), ((1, 1), 1.02), ((1, 1, 1, 1), 2.1)], 1, 4)
        cumulants = cumulants_from_moments(moments)
        assert cumulants.scalar == FLOAT64
        assert series_close(moments_from_cumulants(cumulants), moments, 1e-12)

    def test_moments_need_constant_one(self):
        with pytest.raises(ConstantTermError):
            cumulants_from_moments(make_series([((), 2)], 1, 3))

    def test_cumulants_need_constant_zero(self):
        with pytest.raises(ConstantTermError):
            check_cumulants(make_series([((), 1)], 1, 3))
        with pytest.raises(ConstantTermError):
            moments_from_cumulants(make_series([((), 1)], 1, 3))

    def test_centered(self, gaussian_cumulants, two_letter_moments):
        assert is_centered(gaussian_cumulants)
        assert not is_centered(cumulants_from_moments(two_letter_moments))


class TestChangeOfVariables:
    def test_y_field_of_unit_is_identity(self):
        alphabet = Alphabet(2)
        assert y_field(one(alphabet, 3)) == identity_field(alphabet, 3)

    def test_y_field(self):
        [y] = y_field(make_series([((), 1), ((1, 1), 1)], 1, 3))
        assert y == make_series([((1,), 1), ((1, 1, 1), 1)], 1, 3)

    def test_x_in_y_for_semicircle(self, semicircle):
        # y = x M(x) = x + x³ + 2x⁵ is inverted by x = y - y³ + y⁵
        x = x_in_y(semicircle)[1]
        assert dict(x.coeffs) == {(1,): 1, (1, 1, 1): -1, (1, 1, 1, 1, 1): 1}
        assert x.variable == "y"

    def test_rewrite_moments_gives_cumulants(self, two_letter_moments):
        unit = one(two_letter_moments.alphabet, 5)
        rewritten = rewrite_in_y(add(two_letter_moments, -unit), two_letter_moments)
        assert rewritten == cumulants_from_moments(two_letter_moments)


class TestIdentityChecks:
    def test_functional_equation(self, two_letter_moments):
        cumulants = cumulants_from_moments(two_letter_moments)
        assert functional_equation_check(two_letter_moments, cumulants).passed

    def test_lowdegree_oracle(self, two_letter_moments):
        cumulants = cumulants_from_moments(two_letter_moments)
        report = lowdegree_oracle_check(two_letter_moments, cumulants)
        assert report.passed
        assert report.max_checked_degree == 4

    def test_lowdegree_oracle_random_three_letters(self, rng):
        moments = random_moments(rng, SuiteParams(3, 4))
        assert lowdegree_oracle_check(moments, cumulants_from_moments(moments)).passed

    def test_lowdegree_oracle_catches_wrong_cumulants(self, semicircle):
        wrong = univariate_cumulants({2: 1, 4: 1}, 6)
        report = lowdegree_oracle_check(semicircle, wrong)
        assert not report.passed
        assert report.violations[0].word == (1, 1, 1, 1)

    def test_rewrite_agreement(self, two_letter_moments):
        assert rewrite_agreement_check(two_letter_moments).passed

    def test_derivative_identity(self, rng, two_letter_moments):
        f = random_series(rng, SuiteParams(2, 5), min_degree=0)
        assert derivative_identity_check(f, two_letter_moments).passed

    def test_functional_equation_fails_for_mismatched_pair(self, semicircle):
        wrong = univariate_cumulants({2: 2}, 6)
        assert not functional_equation_check(semicircle, wrong).passed
