"""
conftest.py — shared fixtures: small exact series, regular cumulant series and
seeded random instances.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from planarcalc.cumulants import semicircle_moments
from planarcalc.effective_action import effective_action, univariate_cumulants
from planarcalc.series import Alphabet, make_series
from planarcalc.suites import SuiteParams, random_regular_cumulants


@pytest.fixture()
def one_letter():
    return Alphabet(1)


@pytest.fixture()
def two_letters():
    return Alphabet(2)


@pytest.fixture()
def semicircle():
    """Moments of a standard semicircular variable to degree 6."""
    return semicircle_moments(6)


@pytest.fixture()
def gaussian_cumulants():
    """K = y², the free Gaussian."""
    return univariate_cumulants({2: 1}, 6)


@pytest.fixture()
def cubic_cumulants():
    """K = y² + c y³ + d y⁴ with c = 2, d = 3."""
    return univariate_cumulants({2: 1, 3: 2, 4: 3}, 6)


@pytest.fixture()
def bivariate_cumulants():
    """A regular two-letter cumulant series with a non-diagonal covariance."""
    return make_series(
        [
            ((1, 1), 2),
            ((1, 2), 1),
            ((2, 1), 1),
            ((2, 2), 1),
            ((1, 1, 1), Fraction(1, 2)),
            ((1, 2, 1), -1),
            ((2, 2, 2), 3),
            ((1, 2, 2, 1), Fraction(2, 3)),
        ],
        2,
        6,
        variable="y",
    )


@pytest.fixture()
def bivariate_action(bivariate_cumulants):
    return effective_action(bivariate_cumulants)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def random_cumulants(rng):
    """Factory for seeded regular cumulant series."""

    def build(alphabet: int = 2, degree: int = 5):
        return random_regular_cumulants(rng, SuiteParams(alphabet, degree))

    return build
