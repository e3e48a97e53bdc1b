"""Tests for the seeded verification suites."""
from __future__ import annotations

import pytest

from planarcalc.effective_action import is_regular
from planarcalc.exceptions import ConfigError, PreconditionError
from planarcalc.series import FLOAT64
from planarcalc.suites import (
    DEFAULT_INSTANCES,
    SUITES,
    SuiteParams,
    random_invertible_field,
    random_regular_cumulants,
    random_scalar,
    run_suite,
    suite_document,
    theorem_window,
)

SMALL_RUNS = [
    ("series", 2, 3),
    ("cumulants", 2, 4),
    ("products", 2, 4),
    ("products", 1, 5),
    ("legendre", 2, 4),
    ("two-point", 2, 4),
    ("three-point", 2, 4),
    ("theorem", 2, 4),
    ("univariate", 1, 6),
]


def _docs(reports):
    return [r.to_dict() for r in reports]


class TestRandomInstances:
    def test_scalar_kind(self, rng):
        assert isinstance(random_scalar(rng, FLOAT64), float)
        assert random_scalar(rng) != 0

    def test_regular_cumulants(self, rng):
        k = random_regular_cumulants(rng, SuiteParams(2, 4))
        assert is_regular(k)
        assert k.variable == "y"
        assert all(len(word) >= 2 for word in k.coeffs)

    def test_invertible_field_starts_with_letters(self, rng):
        field = random_invertible_field(rng, SuiteParams(2, 3))
        assert field[1][(1,)] == 1 and field[1][(2,)] == 0
        assert field[2][(2,)] == 1 and field[2][(1,)] == 0


class TestRunSuite:
    @pytest.mark.parametrize("name,alphabet,degree", SMALL_RUNS)
    def test_small_runs_pass(self, name, alphabet, degree):
        reports = run_suite(name, seed=7, alphabet=alphabet, degree=degree, instances=2)
        assert reports
        assert all(r.passed for r in reports), _docs(reports)

    def test_float_run(self):
        reports = run_suite(
            "cumulants",
            seed=3,
            alphabet=2,
            degree=4,
            instances=2,
            scalar=FLOAT64,
            tolerance=1e-9,
        )
        assert all(r.passed for r in reports)

    def test_same_seed_same_reports(self):
        first = run_suite("legendre", seed=11, alphabet=2, degree=4, instances=2)
        second = run_suite("legendre", seed=11, alphabet=2, degree=4, instances=2)
        assert _docs(first) == _docs(second)

    def test_worker_count_does_not_matter(self):
        inline = run_suite("univariate", seed=5, alphabet=1, degree=6, instances=3)
        threaded = run_suite("univariate", seed=5, alphabet=1, degree=6, instances=3, workers=3)
        assert _docs(inline) == _docs(threaded)

    def test_reports_merge_per_identity(self):
        reports = run_suite("products", seed=1, alphabet=2, degree=3, instances=3)
        names = [r.identity for r in reports]
        assert len(names) == len(set(names))
        assert {"bullet_associativity", "distributivity", "derivative_rules"} <= set(names)

    def test_univariate_forces_one_letter(self):
        reports = run_suite("univariate", seed=2, alphabet=3, degree=4, instances=1)
        assert [r.identity for r in reports] == [
            "univariate_order2",
            "univariate_order3",
            "univariate_order4",
        ]

    def test_univariate_reports_printed_discrepancies(self):
        reports = run_suite("univariate", seed=2, alphabet=1, degree=6, instances=2)
        by_name = {r.identity: r for r in reports}
        assert not by_name["univariate_order4"].printed_discrepancies
        assert len(by_name["univariate_order5"].printed_discrepancies) == 2
        assert len(by_name["univariate_order6"].printed_discrepancies) == 2

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            run_suite("hopf", seed=0, alphabet=2, degree=4)

    def test_instances_must_be_positive(self):
        with pytest.raises(ConfigError):
            run_suite("series", seed=0, alphabet=2, degree=4, instances=0)

    @pytest.mark.parametrize("name", ["theorem", "three-point"])
    def test_degree_too_small(self, name):
        with pytest.raises(PreconditionError):
            run_suite(name, seed=0, alphabet=2, degree=2)

    def test_every_suite_has_a_default(self):
        assert set(DEFAULT_INSTANCES) == set(SUITES)


class TestTheoremWindow:
    @pytest.mark.parametrize("degree,window", [(3, (2, 1)), (5, (4, 1)), (8, (5, 3))])
    def test_window(self, degree, window):
        assert theorem_window(degree) == window

    def test_too_small(self):
        with pytest.raises(PreconditionError):
            theorem_window(2)


class TestSuiteDocument:
    def test_layout(self):
        reports = run_suite("two-point", seed=4, alphabet=2, degree=4, instances=1)
        doc = suite_document("two-point", reports, seed=4, degree=4)
        assert doc["suite"] == "two-point"
        assert doc["seed"] == 4
        assert doc["passed"] is True
        assert doc["reports"] == _docs(reports)

