#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test loading, validating and building scenarios.
"""

# Built-in modules #

# Internal modules #
from mangrove.harness.scenario  import Scenario, ScenarioError
from mangrove.harness.checkers  import safety_checks
from mangrove.harness.byzantine import Silent
from mangrove.harness.suite     import acceptance, explorations

# First party modules #

# Third party modules #
import pytest

###############################################################################
@pytest.mark.parametrize("name", acceptance + explorations)
def test_bundled_scenarios_load(name):
    scenario = Scenario.from_path(name)
    assert scenario.name == name
    assert scenario.clients

def test_defaults(make_scenario):
    scenario = make_scenario()
    assert scenario.horizon == 400
    assert list(scenario.checks) == list(safety_checks)
    assert scenario.delay == {'mode': 'fixed', 'cap': 20}
    assert scenario.seeds == [0]
    assert scenario.initial_coins == 10
    assert scenario.controllers == {'alice': 'wallet'}

def test_from_file(tmp_path):
    path = tmp_path / 'tiny.yaml'
    path.write_text("params: {n: 4, f: 1}\nusers: {alice: {}}\n")
    scenario = Scenario.from_path(str(path))
    assert scenario.name == 'tiny'
    assert scenario.params.p == 0 and scenario.params.delta_bound == 10

@pytest.mark.parametrize("text", ["params: [unclosed", "- just\n- a list\n"])
def test_bad_yaml(text):
    with pytest.raises(ScenarioError):
        Scenario.from_text(text)

def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        Scenario.from_path(str(tmp_path) + '/nothing.yaml')

###############################################################################
stranger = {'wallet': {'actors': ['mallory'], 'script': []}}
foreign  = {'wallet': {'actors': ['alice'],
                       'script': [{'at': 0, 'actor': 'bob'}]}}
odd_kind = {'wallet': {'actors': ['alice'],
                       'script': [{'at': 0, 'actor': 'alice', 'kind': 'ra-ra'}]}}
bad_code = {'wallet': {'actors': ['alice'],
                       'script': [{'at': 0, 'actor': 'alice',
                                   'code': [{'op': 'teleport'}]}]}}
twice    = {'one': {'actors': ['alice']}, 'two': {'actors': ['alice']}}

invalid = [
    # Description, overrides
    ("unknown key",          {'colour': 'blue'}),
    ("no params",            {'params': None}),
    ("not resilient",        {'params': {'n': 4, 'f': 1, 'p': 1}}),
    ("byzantine range",      {'validators': {'byzantine': {9: 'silent'}}}),
    ("unknown strategy",     {'validators': {'byzantine': {0: 'lazy'}}}),
    ("too many byzantine",   {'validators': {'byzantine': {0: 'silent',
                                                           1: 'silent'}}}),
    ("unknown delay mode",   {'delay': {'mode': 'chaos'}}),
    ("unknown program",      {'reactive': {'vault': {'program': 'casino'}}}),
    ("name clash",           {'reactive': {'bob': {'program': 'vault'}}}),
    ("duplicate object",     {'users': {'alice': {'objects': [{'id': 'c'}]},
                                        'bob':   {'objects': [{'id': 'c'}]}}}),
    ("bad object",           {'users': {'alice': {'objects': [{'type': 'coin'}]}}}),
    ("unknown behavior",     {'clients': {'w': {'behavior': 'greedy'}}}),
    ("unknown user",         {'clients': stranger}),
    ("two controllers",      {'clients': twice}),
    ("foreign step",         {'clients': foreign}),
    ("unknown step kind",    {'clients': odd_kind}),
    ("malformed code",       {'clients': bad_code}),
    ("unknown check",        {'checks': ['liveliness']}),
]

@pytest.mark.parametrize("description, overrides", invalid)
def test_invalid(make_scenario, description, overrides):
    with pytest.raises(ScenarioError):
        make_scenario(**overrides)

def test_scenario_error_is_value_error():
    assert issubclass(ScenarioError, ValueError)

def test_beyond_resilience(make_scenario):
    scenario = make_scenario(validators={'byzantine': {0: 'silent', 1: 'silent'}},
                             beyond_resilience=True)
    assert sorted(scenario.byzantine) == [0, 1]

###############################################################################
def test_build(make_scenario):
    scenario = make_scenario(validators={'byzantine': {'5': 'silent'}},
                             reactive={'vault': {'program': 'vault',
                                                 'state': 3}})
    sim = scenario.build(seed=7)
    assert sorted(sim.nodes) == list(range(6))
    assert isinstance(sim.nodes[5].strategy, Silent)
    assert not sim.nodes[0].byzantine
    assert sorted(sim.clients) == ['wallet']
    assert sim.meta == {'scenario': 'pytest_scenario', 'coins': 10}
    assert sim.nodes[2].entity('vault').ra_state == 3
    # The script is queued #
    assert sim.pending == 1
    assert sim.delays.mode == 'fixed' and sim.seed == 7
