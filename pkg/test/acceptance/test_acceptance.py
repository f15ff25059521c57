#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to run every bundled scenario end to end. The traces of the three
fast path scenarios are compared byte for byte with the golden files in
`golden/`, which are recorded the first time this script runs.

The full seed ranges and the explorations are marked slow:

    $ pytest -m slow test/acceptance
"""

# Built-in modules #
import time

# Internal modules #
from mangrove.harness.runner  import ScenarioRun, run_scenario
from mangrove.harness.scenario import Scenario
from mangrove.harness.suite   import (acceptance, explorations, parse_seeds,
                                      run_seeds)
from mangrove.harness.explore import Explorer

# First party modules #

# Third party modules #
import pytest

# Constants #
GOLDEN = ('fast_ua', 'fast_uara', 'fast_rara')
BUDGET = 120

###############################################################################
@pytest.mark.parametrize("name", acceptance)
def test_first_seed(name):
    scenario = Scenario.from_path(name)
    seed     = parse_seeds(scenario.seeds)[0]
    run      = ScenarioRun(scenario, seed)
    assert run() == 0, str(run.report)

@pytest.mark.parametrize("name", GOLDEN)
def test_golden_trace(name, this_script_dir):
    golden = this_script_dir + 'golden/' + name + '.jsonl'
    trace, metrics, report = run_scenario(name, seed=0)
    if not golden.exists:
        trace.write(golden)
        pytest.skip("Recorded the golden trace of '%s'." % name)
    assert trace.to_jsonl() == golden.contents

@pytest.mark.parametrize("name", ['fast_uara', 'double_spend'])
def test_deterministic(name):
    first, _, _  = run_scenario(name, seed=3)
    second, _, _ = run_scenario(name, seed=3)
    assert first.to_jsonl() == second.to_jsonl()

###############################################################################
@pytest.mark.slow
@pytest.mark.parametrize("name", acceptance)
def test_every_seed(name):
    scenario = Scenario.from_path(name)
    start    = time.perf_counter()
    results  = run_seeds(scenario, parse_seeds(scenario.seeds), parallel=True)
    elapsed  = time.perf_counter() - start
    failing  = results[results['exit'] != 0]
    assert failing.empty, failing.to_string()
    # Every batch, the thousand double spends included, fits in two minutes #
    assert elapsed < BUDGET, "%i seeds took %.1fs" % (len(results), elapsed)

@pytest.mark.slow
@pytest.mark.parametrize("name", explorations)
def test_exploration(name):
    scenario = Scenario.from_path(name)
    explorer = Explorer(scenario, **scenario.explore)
    report   = explorer.report
    assert report.ok, "Counterexample %s\n%s" % (explorer.counterexample, report)
