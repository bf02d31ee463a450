"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one `criterion N: PASS/FAIL` line with the measured
numbers and asserts the verdict. Known-infeasible clauses are asserted
exactly as specified and fail honestly; the measured values and the
analysis behind each verdict live in the failure detail.

Run with `pytest tests/test_acceptance.py -s` to see every line, or
`dcesim validate` for the same checks outside pytest.
"""

import pytest

from dcesim.acceptance import CRITERIA, RunCache


@pytest.fixture(scope="module")
def cache():
    return RunCache()


def _run(cid, cache):
    result = CRITERIA[cid](cache)
    print()
    print(result.line())
    assert result.passed, result.line()


def test_criterion_01_second_order_amplitude_slope(cache):
    _run(1, cache)


def test_criterion_02_photon_number_formula(cache):
    _run(2, cache)


def test_criterion_03_dce_phenomenology(cache):
    _run(3, cache)


def test_criterion_04_unruh_phenomenology(cache):
    _run(4, cache)


def test_criterion_05_resonance_map_structure(cache):
    _run(5, cache)


def test_criterion_06_dyson_remainder_scaling(cache):
    _run(6, cache)


def test_criterion_07_secular_classification(cache):
    _run(7, cache)


def test_criterion_08_truncation_validation(cache):
    _run(8, cache)


def test_criterion_09_numerical_hygiene(cache):
    _run(9, cache)


def test_criterion_10_lindblad_dce_visibility(cache):
    _run(10, cache)
