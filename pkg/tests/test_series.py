"""Tests for truncated non-commutative series, fields, composition and inversion."""
from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarcalc.cumulants import cumulants_from_moments
from planarcalc.effective_action import effective_action
from planarcalc.exceptions import (
    AlphabetMismatchError,
    ConstantTermError,
    InvalidWordError,
    PreconditionError,
    ScalarKindError,
    SingularLinearPartError,
)
from planarcalc.products import bullet
from planarcalc.series import (
    FLOAT64,
    Alphabet,
    Field,
    add,
    cauchy_product,
    coefficient,
    compose,
    compose_field,
    differential_field,
    evaluate_at_zero,
    fields_equal,
    identity_field,
    in_g0,
    in_g1,
    in_gc,
    integral_field,
    invert_field,
    invert_matrix,
    is_finite,
    iterated_derivative,
    left_derivative,
    letter,
    make_series,
    one,
    prefix_letter,
    scale,
    series_close,
    truncate,
    zero,
)

DEGREE = 4
TWO = Alphabet(2)

words = st.lists(st.integers(1, 2), max_size=DEGREE).map(tuple)
nonempty_words = st.lists(st.integers(1, 2), min_size=1, max_size=DEGREE).map(tuple)
small = st.integers(-3, 3)
cutoffs = st.integers(0, DEGREE)


@st.composite
def series(draw, constant_free=False):
    keys = nonempty_words if constant_free else words
    terms = draw(st.dictionaries(keys, small, max_size=6))
    return make_series(terms, TWO, DEGREE)


@st.composite
def constant_free_fields(draw):
    return Field((draw(series(constant_free=True)), draw(series(constant_free=True))))


@st.composite
def invertible_fields(draw):
    letters = identity_field(TWO, DEGREE)
    higher = st.dictionaries(
        st.lists(st.integers(1, 2), min_size=2, max_size=DEGREE).map(tuple), small, max_size=4
    )
    return Field(tuple(add(x, make_series(draw(higher), TWO, DEGREE)) for x in letters))


def _truncate_field(g, d):
    return Field(tuple(truncate(component, d) for component in g))


class TestConstruction:
    def test_duplicates_are_summed(self):
        f = make_series([((1,), 1), ((1,), 2)], 1, 3)
        assert f[(1,)] == 3

    def test_zero_coefficients_dropped(self):
        f = make_series([((1,), 1), ((1,), -1), ((), 2)], 1, 3)
        assert dict(f.coeffs) == {(): 2}

    def test_integers_become_fractions(self):
        f = make_series([((1, 2), 3)], 2, 3)
        assert isinstance(f[(1, 2)], Fraction)

    def test_float_series(self):
        f = make_series([((1,), 0.5)], 1, 3)
        assert f.scalar == FLOAT64
        assert f[(1,)] == 0.5

    def test_mixed_kinds_rejected(self):
        with pytest.raises(ScalarKindError):
            make_series([((1,), 0.5), ((1, 1), Fraction(1, 2))], 1, 3)

    def test_letter_outside_alphabet(self):
        with pytest.raises(InvalidWordError):
            make_series([((3,), 1)], 2, 3)

    def test_word_beyond_degree(self):
        with pytest.raises(InvalidWordError):
            make_series([((1, 1, 1, 1), 1)], 1, 3)

    def test_negative_degree(self):
        with pytest.raises(PreconditionError):
            make_series([], 1, -1)

    def test_alphabet_must_be_positive(self):
        with pytest.raises(PreconditionError):
            Alphabet(0)

    def test_words_in_lexicographic_order(self):
        assert list(TWO.words(2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_items_sorted_by_degree_then_word(self):
        f = make_series([((2,), 1), ((1, 1), 1), ((), 1), ((1,), 1)], 2, 3)
        assert [w for w, _ in f.items()] == [(), (1,), (2,), (1, 1)]

    def test_variable_tag_ignored_by_equality(self):
        f = make_series([((1,), 1)], 1, 3)
        assert f == f.retag("y")

    def test_str(self):
        f = make_series([((), 1), ((1, 2), Fraction(1, 2))], 2, 2)
        assert str(f) == "1 + 1/2·x1x2 + O(3)"


class TestArithmetic:
    def test_add_keeps_smaller_degree(self):
        f = make_series([((1,), 1)], 1, 3)
        g = make_series([((1,), 2)], 1, 5)
        total = add(f, g)
        assert total.max_degree == 3
        assert total[(1,)] == 3

    def test_cauchy_product_is_noncommutative(self):
        x1, x2 = letter(1, TWO, 3), letter(2, TWO, 3)
        assert dict(cauchy_product(x2, x1).coeffs) == {(2, 1): 1}
        assert cauchy_product(x1, x2) != cauchy_product(x2, x1)

    def test_cauchy_product_difference_of_squares(self):
        f = make_series([((), 1), ((1,), 1)], 1, 3)
        g = make_series([((), 1), ((1,), -1)], 1, 3)
        assert dict(cauchy_product(f, g).coeffs) == {(): 1, (1, 1): -1}

    def test_operators(self):
        f = make_series([((), 1), ((1,), 1)], 1, 3)
        assert (f - f) == zero(Alphabet(1), 3)
        assert (2 * f)[(1,)] == 2
        assert (f * f)[(1,)] == 2

    def test_scale_by_zero(self):
        f = make_series([((1,), 1)], 1, 3)
        assert not scale(0, f)

    def test_truncate(self):
        f = make_series([((1,), 1), ((1, 1, 1), 1)], 1, 3)
        assert dict(truncate(f, 2).coeffs) == {(1,): 1}

    def test_truncate_cannot_raise_degree(self):
        with pytest.raises(PreconditionError):
            truncate(one(TWO, 3), 4)

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            add(one(TWO, 3), one(Alphabet(1), 3))

    def test_prefix_letter_gains_a_degree(self):
        f = make_series([((), 1), ((2,), 1)], 2, 3)
        g = prefix_letter(1, f)
        assert g.max_degree == 4
        assert dict(g.coeffs) == {(1,): 1, (1, 2): 1}

    @settings(max_examples=40, deadline=None)
    @given(series(), series(), series())
    def test_cauchy_associativity(self, f, g, h):
        assert cauchy_product(cauchy_product(f, g), h) == cauchy_product(f, cauchy_product(g, h))


class TestDerivatives:
    def test_left_derivative(self):
        f = make_series([((1, 2), 1), ((2, 1), 3), ((1,), 1)], 2, 3)
        d = left_derivative(f, 1)
        assert dict(d.coeffs) == {(2,): 1, (): 1}
        assert d.max_degree == 2

    def test_iterated_derivative(self):
        f = make_series([((1, 2), 1), ((2, 1), 3), ((1,), 1)], 2, 3)
        d = iterated_derivative(f, (1, 2))
        assert dict(d.coeffs) == {(): 1}
        assert d.max_degree == 1

    def test_iterated_derivative_floors_degree(self):
        f = make_series([((1,), 1)], 1, 1)
        assert iterated_derivative(f, (1, 1)).max_degree == 0

    @settings(max_examples=40, deadline=None)
    @given(series(), words)
    def test_derivative_at_zero_is_coefficient(self, f, word):
        assert evaluate_at_zero(iterated_derivative(f, word)) == coefficient(f, word)

    def test_planar_derivatives_do_not_commute(self):
        f = make_series([((1, 2), 1)], 2, 3)
        assert evaluate_at_zero(iterated_derivative(f, (1, 2))) == 1
        assert evaluate_at_zero(iterated_derivative(f, (2, 1))) == 0

    def test_differential_and_integral_fields(self):
        f = make_series([((), 1), ((2,), 1)], 2, 3)
        assert integral_field(f)[1] == make_series([((1,), 1), ((1, 2), 1)], 2, 3)
        assert differential_field(f)[2] == make_series([((), 1)], 2, 2)

    @settings(max_examples=40, deadline=None)
    @given(series(), series())
    def test_planar_leibniz(self, f, g):
        for i in (1, 2):
            lhs = left_derivative(cauchy_product(f, g), i)
            rhs = add(
                cauchy_product(left_derivative(f, i), g),
                scale(f.constant_term, left_derivative(g, i)),
            )
            assert series_close(lhs, rhs)


class TestPredicates:
    def test_groups(self):
        unit = make_series([((), 1), ((1,), 5)], 2, 3)
        tangent = make_series([((1,), 1), ((2,), 1), ((1, 2), 4)], 2, 3)
        assert in_g1(unit) and not in_g0(unit)
        assert in_g0(tangent) and in_gc(tangent)
        assert not in_gc(make_series([((1,), 1)], 2, 3))

    def test_finite_functional(self):
        assert is_finite(make_series([((1, 1), 1)], 1, 3))
        assert not is_finite(make_series([((1, 1, 1), 1)], 1, 3))


class TestComposition:
    def test_univariate_square(self):
        f = make_series([((1, 1), 1)], 1, 4)
        g = Field((make_series([((1,), 1), ((1, 1), 1)], 1, 4),))
        assert dict(compose(f, g).coeffs) == {(1, 1): 1, (1, 1, 1): 2, (1, 1, 1, 1): 1}

    def test_letter_swap(self):
        f = make_series([((1, 2), 1)], 2, 3)
        swap = Field((letter(2, TWO, 3), letter(1, TWO, 3)))
        assert dict(compose(f, swap).coeffs) == {(2, 1): 1}

    def test_finite_functional_accepts_constant_terms(self):
        f = make_series([((1, 1), 1)], 1, 3)
        shift = Field((make_series([((), 1), ((1,), 1)], 1, 3),))
        assert dict(compose(f, shift).coeffs) == {(): 1, (1,): 2, (1, 1): 1}

    def test_constant_terms_need_finite_functional(self):
        geometric = make_series([((1,) * k, 1) for k in range(4)], 1, 3)
        shift = Field((make_series([((), 1), ((1,), 1)], 1, 3),))
        with pytest.raises(ConstantTermError):
            compose(geometric, shift)

    def test_field_needs_one_component_per_letter(self):
        with pytest.raises(AlphabetMismatchError):
            Field((one(TWO, 3),))

    @settings(max_examples=30, deadline=None)
    @given(series(), constant_free_fields(), constant_free_fields())
    def test_associativity(self, f, g, h):
        assert compose(compose(f, g), h) == compose(f, compose_field(g, h))

    @settings(max_examples=30, deadline=None)
    @given(series(), constant_free_fields())
    def test_chain_rule(self, f, g):
        for i in (1, 2):
            terms = [
                cauchy_product(left_derivative(g[j], i), compose(left_derivative(f, j), g))
                for j in (1, 2)
            ]
            assert series_close(left_derivative(compose(f, g), i), add(*terms))


class TestInversion:
    def test_univariate_reversion(self):
        g = Field((make_series([((1,), 1), ((1, 1), 2)], 1, 3),))
        psi = invert_field(g)
        assert dict(psi[1].coeffs) == {(1,): 1, (1, 1): -2, (1, 1, 1): 8}

    def test_linear_part_inverted(self):
        g = Field(
            (
                make_series([((1,), 2), ((2,), 1)], 2, 2),
                make_series([((1,), 1), ((2,), 1)], 2, 2),
            )
        )
        psi = invert_field(g)
        assert dict(psi[1].coeffs) == {(1,): 1, (2,): -1}
        assert dict(psi[2].coeffs) == {(1,): -1, (2,): 2}

    def test_singular_linear_part(self):
        g = Field((make_series([((1, 1), 1)], 2, 3), make_series([((2,), 1)], 2, 3)))
        with pytest.raises(SingularLinearPartError):
            invert_field(g)

    def test_constant_term_rejected(self):
        g = Field((make_series([((), 1), ((1,), 1)], 1, 3),))
        with pytest.raises(ConstantTermError):
            invert_field(g)

    def test_variable_tag(self):
        g = Field((make_series([((1,), 1), ((1, 1), 1)], 1, 3),))
        assert invert_field(g, variable="phi")[1].variable == "phi"

    def test_float_singular_matrix(self):
        with pytest.raises(SingularLinearPartError):
            invert_matrix([[1.0, 2.0], [2.0, 4.0]], FLOAT64)

    def test_exact_matrix_inverse(self):
        matrix = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
        inverse = invert_matrix(matrix, "rational")
        assert inverse == [[1, -1], [-1, 2]]

    @settings(max_examples=30, deadline=None)
    @given(invertible_fields())
    def test_round_trip(self, g):
        psi = invert_field(g)
        letters = identity_field(TWO, DEGREE)
        assert fields_equal(compose_field(g, psi), letters)
        assert fields_equal(compose_field(psi, g), letters)


class TestTruncationConsistency:
    @settings(max_examples=30, deadline=None)
    @given(series(), series(), cutoffs)
    def test_cauchy_product(self, f, g, d):
        assert truncate(cauchy_product(f, g), d) == cauchy_product(truncate(f, d), truncate(g, d))

    @settings(max_examples=30, deadline=None)
    @given(series(), constant_free_fields(), cutoffs)
    def test_compose(self, f, g, d):
        assert truncate(compose(f, g), d) == compose(truncate(f, d), _truncate_field(g, d))

    @settings(max_examples=30, deadline=None)
    @given(series(), series(constant_free=True), cutoffs)
    def test_bullet(self, f, h, d):
        g = add(one(TWO, DEGREE), h)
        assert truncate(bullet(f, g), d) == bullet(truncate(f, d), truncate(g, d))

    @settings(max_examples=30, deadline=None)
    @given(invertible_fields(), st.integers(1, DEGREE))
    def test_invert_field(self, g, d):
        assert _truncate_field(invert_field(g), d) == invert_field(_truncate_field(g, d))

    @settings(max_examples=30, deadline=None)
    @given(series(constant_free=True), cutoffs)
    def test_cumulants_from_moments(self, h, d):
        moments = add(one(TWO, DEGREE), h)
        expected = truncate(cumulants_from_moments(moments), d)
        assert cumulants_from_moments(truncate(moments, d)) == expected

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_effective_action(self, bivariate_cumulants, d):
        full = effective_action(bivariate_cumulants).series
        assert effective_action(truncate(bivariate_cumulants, d)).series == truncate(full, d)


class TestCoefficient:
    def test_missing_word_is_zero(self):
        assert coefficient(one(TWO, 3), (1, 2)) == 0

    def test_invalid_word(self):
        with pytest.raises(InvalidWordError):
            coefficient(one(TWO, 3), (0,))
