#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test seed batches and the acceptance suite object.
"""

# Built-in modules #
import warnings

# Internal modules #
from mangrove.harness.suite import parse_seeds, run_seeds, Suite, columns

# First party modules #

# Third party modules #
import pytest

###############################################################################
seeds = [
    # Given, expected
    (3,        [3]),
    ([1, 2],   [1, 2]),
    ('2:5',    [2, 3, 4]),
    ('7',      [7]),
    ((0, '1'), [0, 1]),
]

@pytest.mark.parametrize("given, expected", seeds)
def test_parse_seeds(given, expected):
    assert parse_seeds(given) == expected

@pytest.mark.parametrize("given", [None, True, 'a:b', 2.5])
def test_bad_seeds(given):
    with pytest.raises(ValueError):
        parse_seeds(given)

def test_run_seeds(make_scenario):
    results = run_seeds(make_scenario(delay={'mode': 'synchronous'}), [0, 1, 2])
    assert list(results['seed']) == [0, 1, 2]
    assert set(results['exit']) == {0}
    assert set(results['status']) == {'quiescent'}
    assert set(results['problems']) == {''}

def test_suite():
    suite = Suite(names=['fast_ua'], explore=[], seeds='0:2', verbose=False)
    results = suite()
    assert len(results) == 2
    assert suite.exit_code == 0
    assert 'fast_ua' in str(suite)

def test_run_seeds_in_parallel(make_scenario):
    scenario = make_scenario(delay={'mode': 'synchronous'})
    serial   = run_seeds(scenario, [0, 1, 2])
    parallel = run_seeds(scenario, [0, 1, 2], parallel=True)
    assert parallel.equals(serial)

def test_suite_without_runs():
    suite = Suite(names=['fast_ua'], explore=[], seeds=[], verbose=False)
    with warnings.catch_warnings():
        warnings.simplefilter('error', FutureWarning)
        results = suite()
    assert results.empty and list(results.columns) == columns
    assert suite.exit_code == 0
