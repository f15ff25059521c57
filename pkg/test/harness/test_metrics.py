#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test hop counting and the metric tables.
"""

# Built-in modules #
import warnings

# Internal modules #
from mangrove.network.trace    import Trace
from mangrove.harness.metrics  import Metrics, causal_depths
from mangrove.harness.runner   import run_scenario

# First party modules #

# Third party modules #
import pandas

###############################################################################
def test_causal_depths():
    trace = Trace()
    trace.add(0, 'meta')
    trace.add(0, 'send', at='V0.a')
    trace.add(5, 'deliver', cause=1, at='V1.a', link='outer')
    trace.add(5, 'send', cause=2, at='V1.a')
    trace.add(5, 'deliver', cause=3, at='V1.b', link='inner')
    trace.add(9, 'deliver', cause=3, at='V2.a', link='outer')
    trace.add(9, 'decide', cause=5, deps=[4, 5], at='V2.a')
    assert causal_depths(trace) == [0, 0, 1, 1, 1, 2, 2]

def test_ua_metrics(make_scenario):
    trace, metrics, report = run_scenario(make_scenario())
    assert metrics.hops_of('pay') == {'leader': [], 'others': [2]}
    assert metrics.hops_of('nothing') == {'leader': [], 'others': []}
    assert metrics.fast()
    assert set(metrics.paths['scope']) == {'pob/alice/0'}
    assert metrics.chains.empty
    # Every validator votes once to every validator #
    votes = metrics.messages.set_index(['msg', 'link'])['count']
    assert votes[('UaVote', 'outer')] == 30
    assert votes[('UaVote', 'inner')] == 6

def test_uara_metrics(make_scenario):
    deposit = {'at': 0, 'label': 'deposit', 'actor': 'alice', 'kind': 'ua-ra',
               'recipient': 'vault', 'consume': ['alice.coin.0'],
               'call': {'function': 'deposit'}}
    scenario = make_scenario(reactive = {'vault': {'program': 'vault'}},
                             clients  = {'wallet': {'actors': ['alice'],
                                                    'script': [deposit]}})
    trace, metrics, report = run_scenario(scenario)
    assert metrics.hops_of('deposit') == {'leader': [2], 'others': [3]}
    chains = metrics.chains
    assert sorted(chains['node']) == list(range(6))
    assert set(chains['instances']) == {1} and set(chains['txs']) == {1}
    assert metrics.leaders[(3, 'poa/vault/0')] == 0

def test_write_metrics(make_scenario, tmp_path):
    trace, metrics, report = run_scenario(make_scenario())
    path  = metrics.write(str(tmp_path) + '/metrics.tsv')
    frame = pandas.read_csv(str(path), sep='\t')
    assert set(frame['table']) >= {'hops', 'paths', 'messages'}
    assert 'hops' in str(metrics)

def test_write_skips_empty_tables(make_scenario, tmp_path):
    trace, metrics, report = run_scenario(make_scenario())
    assert metrics.chains.empty
    with warnings.catch_warnings():
        warnings.simplefilter('error', FutureWarning)
        path = metrics.write(str(tmp_path) + '/metrics.tsv')
    frame = pandas.read_csv(str(path), sep='\t')
    assert 'chains' not in set(frame['table'])

def test_write_without_records(tmp_path):
    trace = Trace()
    trace.add(0, 'meta', n=4, byzantine=[])
    with warnings.catch_warnings():
        warnings.simplefilter('error', FutureWarning)
        path = Metrics(trace).write(str(tmp_path) + '/metrics.tsv')
    frame = pandas.read_csv(str(path), sep='\t')
    assert list(frame.columns) == ['table'] and frame.empty

def test_labels_of_emissions():
    trace = Trace()
    trace.add(0, 'meta', n=4, byzantine=[])
    trace.add(0, 'emit', at='client.w', tx='t1', label='pay')
    trace.add(5, 'emit', at='V0.x', tx='t2', parent='t1')
    trace.add(5, 'emit', at='V0.x', tx='t3', parent='t2')
    assert Metrics(trace).labels == {'t1': 'pay', 't2': 'pay.emit',
                                     't3': 'pay.emit.emit'}
