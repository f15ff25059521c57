#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test the delay policy, the event loop, timers, choice points
and trace records.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #
from mangrove.core.params       import SystemParams
from mangrove.network.delays    import DelayPolicy
from mangrove.network.simulator import Simulator, Address, client_address
from mangrove.network.trace     import Trace

# First party modules #

# Third party modules #
import pytest

###############################################################################
@dataclass(frozen=True)
class Ping:
    number: int

class Recorder:
    """A client endpoint remembering what it receives."""

    def __init__(self, sim, name):
        self.sim, self.name = sim, name
        self.address  = client_address(name)
        self.received = []
        self.timers   = []
        self.calls    = []
        sim.add_client(self)

    def on_message(self, msg, src): self.received.append((self.sim.now, msg))
    def on_timer(self, timer_id):   self.timers.append((self.sim.now, timer_id))

    def on_call(self, payload):
        self.calls.append((self.sim.now, payload))
        if 'send' in payload:
            self.sim.send(self.address, client_address(payload['send']),
                          Ping(payload['number']))

def ping(sim, src, dst, at=0, number=1):
    """Schedule `src` to send a Ping to `dst` from inside the event loop."""
    sim.call_at(at, src.address, {'label': 'ping', 'send': dst.name,
                                  'number': number})

###############################################################################
@pytest.mark.parametrize("mode", ['synchronous', 'pre-gst-adversarial', 'fixed'])
def test_delays_respect_bound(mode):
    params = SystemParams(n=4, f=1, p=0, delta_bound=5, gst=50)
    policy = DelayPolicy(params, mode=mode, seed=3)
    for sent in range(0, 100, 7):
        delay = policy.outer_delay(sent, 0, 1)
        assert 0 < delay
        assert sent + delay <= max(sent + 5, 50 + 5)

def test_drop_byzantine():
    params = SystemParams(n=4, f=1, p=0, delta_bound=5)
    policy = DelayPolicy(params, mode='drop-byzantine', byzantine=[3])
    assert policy.outer_delay(0, 3, 1) is None
    assert policy.outer_delay(0, 1, 3) is not None

def test_unknown_mode(params):
    with pytest.raises(ValueError):
        DelayPolicy(params, mode='chaos')

###############################################################################
def test_send_and_deliver(sim):
    alice, bob = Recorder(sim, 'a'), Recorder(sim, 'b')
    sim.call_at(3, alice.address, {'label': 'go'})
    ping(sim, alice, bob, at=5)
    trace = sim.run()
    assert alice.calls[0] == (3, {'label': 'go'})
    # Fixed delays of Δ=10 #
    assert bob.received == [(15, Ping(1))]
    assert trace.status == 'quiescent'

def test_records_and_causes(sim):
    alice, bob = Recorder(sim, 'a'), Recorder(sim, 'b')
    ping(sim, alice, bob)
    trace   = sim.run()
    meta    = trace[0]
    send    = trace.of_kind('send')[0]
    deliver = trace.of_kind('deliver')[0]
    assert meta['kind'] == 'meta' and meta['n'] == 6 and meta['mode'] == 'fixed'
    assert send['at'] == 'client.a' and send['dst'] == 'client.b'
    assert deliver['cause'] == send['id']
    assert deliver['digest'] == send['digest']
    assert deliver['msg'] == 'Ping' and deliver['link'] == 'outer'
    assert trace.records[-1]['kind'] == 'end'
    # Ids are indices #
    assert [r['id'] for r in trace] == list(range(len(trace)))

def test_inner_link_takes_no_time(sim):
    class Node:
        index, byzantine = 0, False
        def __init__(self): self.got = []
        def entity(self, name): return self
        def on_call(self, payload):
            sim.send(Address(0, 'x'), Address(0, 'y'), Ping(2))
        def on_message(self, msg, src): self.got.append(sim.now)
        def snapshot(self): return []
    node = Node()
    sim.add_node(node)
    sim.call_at(7, Address(0, 'x'), {'label': 'go'})
    sim.run()
    assert node.got == [7]
    assert sim.trace.of_kind('deliver')[0]['link'] == 'inner'

def test_timers(sim):
    alice  = Recorder(sim, 'a')
    first  = sim.set_timer(alice.address, 5, 'first')
    second = sim.set_timer(alice.address, 8, 'second')
    assert sim.timer_pending(first)
    sim.cancel_timer(second)
    assert not sim.timer_pending(second)
    sim.run()
    assert alice.timers == [(5, 'first')]
    assert not sim.timer_pending(first)

def test_horizon(sim):
    alice = Recorder(sim, 'a')
    sim.call_at(5, alice.address, {'label': 'early'})
    sim.call_at(5000, alice.address, {'label': 'late'})
    trace = sim.run()
    assert trace.status == 'horizon'
    assert len(alice.calls) == 1

###############################################################################
def test_choices_random_are_seeded(params):
    picks = []
    for _ in range(2):
        sim = Simulator(params, seed=11)
        picks.append([sim.choose(5) for _ in range(10)])
    assert picks[0] == picks[1]
    assert Simulator(params).choose(1) == 0

def test_choices_follow_schedule(params):
    sim = Simulator(params, schedule=[2, 9])
    assert sim.choose(3) == 2
    # Clamped to the number of options #
    assert sim.choose(3) == 2
    # Zero past the end of the schedule #
    assert sim.choose(3) == 0
    assert sim.choices == [(3, 2), (3, 2), (3, 0)]

def test_exploring_picks_among_pending(params):
    delays = DelayPolicy(params, mode='fixed')
    sim    = Simulator(params, delays, schedule=[1], width=2)
    alice  = Recorder(sim, 'a')
    sim.call_at(1, alice.address, {'label': 'one'})
    sim.call_at(1, alice.address, {'label': 'two'})
    sim.run()
    # The second pending event fired first #
    assert [c[1]['label'] for c in alice.calls] == ['two', 'one']
    assert sim.choices == [(2, 1)]

def test_exploring_never_fires_late(params):
    delays = DelayPolicy(params, mode='fixed')
    sim    = Simulator(params, delays, schedule=[1, 1, 1], width=2)
    alice  = Recorder(sim, 'a')
    sim.call_at(1, alice.address, {'label': 'one'})
    sim.call_at(2, alice.address, {'label': 'two'})
    sim.run()
    # Events due at different times keep their order and cost no choice #
    assert alice.calls == [(1, {'label': 'one'}), (2, {'label': 'two'})]
    assert sim.choices == []

###############################################################################
def test_trace_round_trip(sim, tmp_path):
    alice, bob = Recorder(sim, 'a'), Recorder(sim, 'b')
    ping(sim, alice, bob)
    trace = sim.run()
    path  = trace.write(str(tmp_path) + '/trace.jsonl')
    again = Trace.load(path)
    assert again.records == trace.records
    assert again.to_jsonl() == trace.to_jsonl()
    assert again.meta['delta'] == 10
    assert again.status == 'quiescent'
    assert [r['kind'] for r in again.events] == ['call', 'send', 'deliver']

def test_trace_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        Trace.load(str(tmp_path) + '/nothing.jsonl')
