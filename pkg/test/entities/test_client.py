#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test the clients: the emission predicate of honest clients,
references to earlier outputs, and the two misbehaving clients.
"""

# Built-in modules #

# Internal modules #
from mangrove.entities.client  import UserClient, EmissionError
from mangrove.harness.runner   import run_scenario

# First party modules #

# Third party modules #
import pytest

###############################################################################
def script(*steps, behavior='honest'):
    return {'wallet': {'behavior': behavior, 'actors': ['alice'],
                       'script': list(steps)}}

def pay(at=0, label='pay', consume=('alice.coin.0',), owner='bob', **extra):
    step = {'at': at, 'label': label, 'actor': 'alice', 'kind': 'ua',
            'consume': list(consume),
            'code': [{'op': 'transfer', 'slot': 0, 'owner': owner}]}
    step.update(extra)
    return step

def coins_of(trace, at):
    snapshot, = [r for r in trace.of_kind('snapshot') if r['at'] == at]
    return sorted(o['payload'] for o in snapshot['owned'] if o['type'] == 'coin')

###############################################################################
def test_unknown_behavior(sim):
    with pytest.raises(ValueError):
        UserClient(sim, 'eve', ['alice'], behavior='greedy')

def test_lookup(sim, alice_coin):
    client = UserClient(sim, 'wallet', ['alice'],
                        objects={'alice': (alice_coin,)})
    assert client.lookup('alice.coin.0') == alice_coin
    with pytest.raises(EmissionError):
        client.lookup('ghost')
    with pytest.raises(EmissionError):
        client.lookup('@split:0')
    # Sequence numbers must follow each other #
    with pytest.raises(EmissionError):
        client.check('alice', 1, ())

def test_unknown_object(make_scenario):
    scenario = make_scenario(clients=script(pay(consume=['ghost'])))
    trace, metrics, report = run_scenario(scenario)
    assert report.ok
    error, = trace.of_kind('emit_error')
    assert error['label'] == 'pay' and 'ghost' in error['reason']
    assert not trace.of_kind('emit')

def test_chained_steps(make_scenario):
    split = {'at': 0, 'label': 'split', 'actor': 'alice', 'kind': 'ua',
             'consume': ['alice.coin.0'],
             'code': [{'op': 'split', 'slot': 0, 'parts': [4, 6]}]}
    spend = pay(label='spend', consume=['@split:0'], wait=True)
    scenario = make_scenario(clients=script(split, spend))
    checks = ['agreement', 'no_conflict', 'ua_agreement', 'integrity',
              'object_safety', 'validity']
    trace, metrics, report = run_scenario(scenario, checks=checks)
    assert report.ok, str(report)
    # The second step waited for the first to execute #
    emits = trace.of_kind('emit')
    assert [r['label'] for r in emits] == ['split', 'spend']
    assert [r['sn'] for r in emits] == [0, 1]
    for i in range(6):
        assert coins_of(trace, 'V%i.alice' % i) == [6]
        assert coins_of(trace, 'V%i.bob' % i)   == [4]

def test_waiting_gives_up(make_scenario):
    spend = pay(label='spend', consume=['@nothing:0'], wait=True, tries=3)
    trace, metrics, report = run_scenario(make_scenario(clients=script(spend)))
    error, = trace.of_kind('emit_error')
    assert error['time'] == 30

###############################################################################
def test_double_spender_shares(make_scenario):
    step = pay(variants=[{}, {'code': [{'op': 'transfer', 'slot': 0,
                                        'owner': 'alice'}]}])
    scenario = make_scenario(clients=script(step, behavior='double-spender'))
    trace, metrics, report = run_scenario(scenario)
    assert report.ok, str(report)
    first, second = trace.of_kind('emit')
    assert first['targets'] == [0, 1, 2] and second['targets'] == [3, 4, 5]
    assert first['sn'] == second['sn'] == 0
    assert first['tx'] != second['tx']
    # Each validator saw both versions through the votes #
    assert trace.of_kind('evidence')

def test_stale_object(make_scenario):
    steps = script(pay(), pay(at=200, label='again', owner='alice'),
                   behavior='stale-object')
    trace, metrics, report = run_scenario(make_scenario(clients=steps))
    assert report.ok, str(report)
    # Both were emitted but only the first took effect #
    assert len(trace.of_kind('emit')) == 2
    executed = [r for r in trace.of_kind('execute') if r['at'] == 'V0.alice']
    assert [r['sn'] for r in executed] == [0]
    assert coins_of(trace, 'V0.bob') == [10]
