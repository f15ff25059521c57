#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test the bounded exploration of schedules.
"""

# Built-in modules #

# Internal modules #
from mangrove.harness          import explore as explore_module
from mangrove.harness.explore  import Explorer, explore
from mangrove.harness.checkers import CheckReport, Outcome, PASS, FAIL, SKIPPED
from mangrove.harness.runner   import run_scenario

# First party modules #

# Third party modules #
import mock, pytest

###############################################################################
class FakeRun:
    """Three binary choice points, the schedules starting 1, 1 violate."""

    def __init__(self, scenario, seed, schedule, width, checks):
        self.choices = list(schedule) + [0] * (3 - len(schedule))
        self.sim     = mock.Mock(choices=[(2, pick) for pick in self.choices])
        bad = self.choices[:2] == [1, 1]
        self.report = CheckReport([Outcome('agreement', FAIL if bad else PASS,
                                           7 if bad else None,
                                           'Boom.' if bad else '')])

@pytest.fixture
def fake_runs(monkeypatch):
    monkeypatch.setattr(explore_module, 'ScenarioRun', FakeRun)

def test_counterexample(fake_runs, make_scenario):
    explorer = Explorer(make_scenario(), depth=3, checks=['agreement'])
    report   = explorer.report
    assert explorer.counterexample == [1, 1, 0]
    assert explorer.runs == 3 and explorer.complete is False
    assert report['agreement'].status == FAIL
    assert '[1, 1, 0]' in report['agreement'].message
    assert report.exit_code == 1

def test_depth_bounds_the_search(fake_runs, make_scenario):
    explorer = Explorer(make_scenario(), depth=1, checks=['agreement'])
    assert explorer.report.ok
    assert explorer.runs == 2 and explorer.complete
    assert explorer.report['coverage'].status == PASS

def test_run_cap(fake_runs, make_scenario):
    explorer = Explorer(make_scenario(), depth=3, max_runs=2,
                        checks=['agreement'])
    report = explorer.report
    assert explorer.runs == 2 and explorer.complete is False
    assert report['coverage'].status == SKIPPED
    assert report.exit_code == 0

###############################################################################
def test_explore_small_scenario():
    report = explore('explore_n4', depth=2, width=2, max_runs=4)
    assert report.ok, str(report)
    assert report['coverage'].status in (PASS, SKIPPED)

@pytest.mark.parametrize("schedule", [[1] * 8, [0, 1] * 4, [1, 0, 1, 1, 0, 1]])
def test_reordering_keeps_the_network_model(schedule):
    trace, metrics, report = run_scenario('explore_n4', schedule=schedule,
                                          checks=['delivery_bound',
                                                  'perfect_links', 'agreement'])
    assert report.ok, str(report)
    times = [r['time'] for r in trace.events]
    assert times == sorted(times)
