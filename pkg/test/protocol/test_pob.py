#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test Parallel Optimistic Broadcast on small simulations, the
fast path with everybody honest and the slow path through Transaction
Agreement when too many validators are silent for the fast quorum.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.objects       import coin, user
from mangrove.core.transactions  import UaTx
from mangrove.harness.runner     import run_scenario
from mangrove.harness.checkers   import safety_checks, liveness_checks
from mangrove.vm.commands        import Transfer

# First party modules #

# Third party modules #
import mock, pytest

###############################################################################
def decisions(trace, scope):
    return {r['at']: r for r in trace.of_kind('decide') if r['scope'] == scope}

def coins_of(trace, at):
    snapshot, = [r for r in trace.of_kind('snapshot') if r['at'] == at]
    return sorted(o['payload'] for o in snapshot['owned'] if o['type'] == 'coin')

###############################################################################
def test_fast_path(make_scenario):
    checks = list(safety_checks) + list(liveness_checks) + ['fast_termination']
    trace, metrics, report = run_scenario(make_scenario(), checks=checks)
    assert report.ok, str(report)
    decided = decisions(trace, 'pob/alice/0')
    assert sorted(decided) == ['V%i.alice' % i for i in range(6)]
    assert {r['path'] for r in decided.values()} <= {'fast', 'proof'}
    # Two communication steps from the client emission #
    assert metrics.hops_of('pay') == {'leader': [], 'others': [2]}
    # Bob owns the coin everywhere, alice owns nothing #
    for i in range(6):
        assert coins_of(trace, 'V%i.bob' % i)   == [10]
        assert coins_of(trace, 'V%i.alice' % i) == []

def test_slow_path(make_scenario):
    scenario = make_scenario(params     = {'n': 4, 'f': 1, 'p': 0, 'delta': 10},
                             validators = {'byzantine': {3: 'silent'}},
                             horizon    = 2000)
    checks = list(safety_checks) + ['termination', 'validity']
    trace, metrics, report = run_scenario(scenario, checks=checks)
    assert report.ok, str(report)
    decided = decisions(trace, 'pob/alice/0')
    for i in range(3):
        assert decided['V%i.alice' % i]['path'] == 'slow'
        assert coins_of(trace, 'V%i.bob' % i) == [10]
    # Transaction Agreement decided the same transaction #
    agreed = decisions(trace, 'ta/alice/0')
    assert len({r['value'] for r in agreed.values()}) == 1

def test_one_vote_per_slot(make_scenario):
    trace, metrics, report = run_scenario(make_scenario())
    votes = [r for r in trace.of_kind('send')
             if r['msg'] == 'UaVote' and r['dst'] == 'V0.alice']
    assert len(votes) == 6

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_double_spend(make_scenario, seed):
    clients = {'mallory': {
        'behavior': 'double-spender',
        'actors':   ['alice'],
        'script':   [{'at': 0, 'label': 'pay', 'actor': 'alice', 'kind': 'ua',
                      'consume': ['alice.coin.0'],
                      'code': [{'op': 'transfer', 'slot': 0, 'owner': 'bob'}],
                      'variants': [{}, {'code': [{'op': 'transfer', 'slot': 0,
                                                  'owner': 'carol'}]}]}]}}
    scenario = make_scenario(users   = {'alice': {'objects': [{'id': 'alice.coin.0',
                                                               'payload': 10}]},
                                        'bob': {}, 'carol': {}},
                             clients = clients,
                             delay   = {'mode': 'synchronous'})
    trace, metrics, report = run_scenario(scenario, seed=seed)
    assert report.ok, str(report)
    # Both versions were sent, at most one took effect #
    assert len(trace.of_kind('emit')) == 2
    executed = {r['tx'] for r in trace.of_kind('execute')}
    assert len(executed) <= 1

###############################################################################
def test_conflicting_version_refused(make_scenario):
    sim    = make_scenario().build()
    entity = sim.nodes[0].entity('alice')
    key    = sim.keyring.generate('alice')
    pay    = lambda owner: sim.keyring.sign_tx(key, UaTx(user('alice'), 0,
                           (coin('alice.coin.0', 10, user('alice')),),
                           (Transfer(0, owner),)))
    first, second, third = pay('bob'), pay('carol'), pay('dave')
    instance = entity.pob(0)
    with mock.patch.object(entity, 'broadcast') as broadcast:
        instance.on_tx(first)
        instance.on_tx(first)
        instance.on_tx(second)
        instance.on_tx(third)
    # A vote for the first version then a single ⊥ #
    sent = [call.args[0] for call in broadcast.call_args_list]
    assert [m.vote.value for m in sent] == [first.tx_id, None]
    assert sent[0].tx == first and sent[1].tx is None
    assert entity.fp_locked[0] == first
