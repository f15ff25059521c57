#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

A single threaded discrete-event simulator. Entities are state machines
that only ever interact by sending messages through it. Outer Links join
entities of different validators (and clients to validators) and take a
positive delay chosen by the DelayPolicy. Inner Links join entities of
the same validator and take no time at all, but still go through the
event queue.

Every nondeterministic decision, be it which pending event fires next in
exploration mode or which option a Byzantine strategy picks, goes through
`choose`. The list of choices made is therefore a complete, replayable
description of a schedule.
"""

# Built-in modules #
import heapq, itertools, random
from dataclasses import dataclass, field

# Internal modules #
from mangrove.core.serialization import digest, short
from mangrove.core.votes         import scope_label
from mangrove.crypto.signatures  import Keyring
from mangrove.network.delays     import DelayPolicy
from mangrove.network.trace      import Trace

# First party modules #
from plumbing.common import split_thousands as thousands

# Third party modules #

# Constants #
CLIENT = -1

###############################################################################
@dataclass(frozen=True, order=True)
class Address:
    """An entity (validator index, actor name) or a client (-1, name)."""

    node:  int
    actor: str

    def __str__(self):
        if self.is_client: return 'client.%s' % self.actor
        return 'V%i.%s' % (self.node, self.actor)

    @property
    def is_client(self): return self.node == CLIENT

def client_address(name): return Address(CLIENT, name)

###############################################################################
@dataclass(order=True)
class SimEvent:
    """
    Events fire in (fire_time, seq) order. The `record` is the id of the
    trace record that scheduled the event, it becomes the cause of the
    record written when the event fires.
    """

    fire_time: int
    seq:       int
    kind:      str     = field(compare=False)
    target:    Address = field(compare=False)
    payload:   object  = field(compare=False)
    source:    Address = field(default=None, compare=False)
    link:      str     = field(default=None, compare=False)
    record:    int     = field(default=None, compare=False)
    digest:    str     = field(default=None, compare=False)

###############################################################################
class Simulator:
    """
    Owns the event queue, the trace, the key ring and every registered
    validator and client. Two scheduling modes exist:

        * random (default): events fire strictly in (time, seq) order and
                            `choose` draws from a seeded generator.
        * exploring: a list of integers `schedule` is given. Each call to
                     `choose`, including the pick among the first `width`
                     pending events, consumes one integer (0 past the end).
    """

    def __repr__(self):
        return '<%s object at time %i>' % (self.__class__.__name__, self.now)

    def __init__(self, params, delays=None, keyring=None, seed=0,
                 horizon=None, schedule=None, width=2, verbose=False):
        # Save attributes #
        self.params   = params
        self.quorums  = params.quorums
        self.delays   = delays or DelayPolicy(params, seed=seed)
        self.keyring  = keyring or Keyring()
        self.seed     = seed
        self.horizon  = horizon
        self.schedule = list(schedule) if schedule is not None else None
        self.width    = width
        self.verbose  = verbose
        # Adversary choices have their own generator #
        self.rng = random.Random('choices:%s' % seed)
        # State #
        self.queue    = []
        self.counter  = itertools.count()
        self.timers   = {}
        self.now      = 0
        self.current  = None
        self.choices  = []
        self.nodes    = {}
        self.clients  = {}
        self.status   = None
        self.trace    = Trace()
        self.meta     = {}

    #----------------------------- Properties --------------------------------#
    @property
    def exploring(self): return self.schedule is not None

    @property
    def pending(self): return len(self.queue)

    #---------------------------- Registration -------------------------------#
    def add_node(self, node):
        self.nodes[node.index] = node

    def add_client(self, client):
        self.clients[client.name] = client

    def endpoint(self, address):
        """The entity or client living at `address`."""
        if address.is_client: return self.clients[address.actor]
        return self.nodes[address.node].entity(address.actor)

    #------------------------------- Records ---------------------------------#
    def record(self, kind, at=None, deps=None, scope=None, **fields):
        """Write a record caused by the event currently being processed."""
        return self.trace.add(self.now, kind, cause=self.current, deps=deps,
                              at=str(at) if at is not None else None,
                              scope=scope_label(scope), **fields)

    #------------------------------ Messaging --------------------------------#
    def send(self, src, dst, msg):
        """Pick the link: same validator means Inner Link."""
        if not src.is_client and not dst.is_client and src.node == dst.node:
            return self.send_inner(src, dst, msg)
        return self.send_outer(src, dst, msg)

    def send_outer(self, src, dst, msg):
        # Record the send #
        payload_digest = short(digest(msg))
        rid = self.record('send', at=src, dst=str(dst), link='outer',
                          msg=msg.__class__.__name__, digest=payload_digest,
                          scope=getattr(msg, 'scope', None))
        # Pick a delay, None means the adversary lost it #
        delay = self.delays.outer_delay(self.now, src.node, dst.node)
        if delay is None:
            self.record('drop', at=src, dst=str(dst), send=rid,
                        reason='byzantine-sender')
            return None
        # Enqueue #
        return self.enqueue(self.now + delay, 'deliver', dst, msg, source=src,
                            link='outer', record=rid, digest=payload_digest)

    def send_inner(self, src, dst, msg):
        payload_digest = short(digest(msg))
        rid = self.record('send', at=src, dst=str(dst), link='inner',
                          msg=msg.__class__.__name__, digest=payload_digest,
                          scope=getattr(msg, 'scope', None))
        return self.enqueue(self.now, 'deliver', dst, msg, source=src,
                            link='inner', record=rid, digest=payload_digest)

    def enqueue(self, time, kind, target, payload, **kwargs):
        event = SimEvent(time, next(self.counter), kind, target, payload,
                         **kwargs)
        heapq.heappush(self.queue, event)
        return event

    #-------------------------------- Timers ---------------------------------#
    def set_timer(self, address, duration, timer_id):
        """Returns a handle usable with `cancel_timer` and `timer_pending`."""
        event = self.enqueue(self.now + duration, 'timer', address, timer_id,
                             record=self.current)
        self.timers[event.seq] = event
        return event.seq

    def cancel_timer(self, handle):
        event = self.timers.pop(handle, None)
        if event is None: return
        self.queue.remove(event)
        heapq.heapify(self.queue)

    def timer_pending(self, handle):
        return handle in self.timers

    def call_at(self, time, address, payload):
        """Schedule a local action, used for client scripts."""
        return self.enqueue(max(time, self.now), 'call', address, payload)

    #------------------------------- Choices ---------------------------------#
    def choose(self, count, label=None):
        """Pick an integer in [0, count). Single options are not recorded."""
        if count <= 1: return 0
        if self.exploring:
            index = len(self.choices)
            pick  = self.schedule[index] if index < len(self.schedule) else 0
            pick  = min(pick, count - 1)
        else:
            pick = self.rng.randrange(count)
        self.choices.append((count, pick))
        return pick

    #------------------------------- Running ---------------------------------#
    def pop(self):
        """
        Remove and return the next event to fire. While exploring, only
        events due at the same instant as the earliest one may be reordered,
        so no event ever fires after its own `fire_time`.
        """
        if not self.exploring or self.width <= 1:
            return heapq.heappop(self.queue)
        due = self.queue[0].fire_time
        candidates = [event for event in heapq.nsmallest(self.width, self.queue)
                      if event.fire_time == due]
        if len(candidates) == 1: return heapq.heappop(self.queue)
        event = candidates[self.choose(len(candidates), 'schedule')]
        self.queue.remove(event)
        heapq.heapify(self.queue)
        return event

    def step(self):
        """Fire one event."""
        event = self.pop()
        self.timers.pop(event.seq, None)
        self.now = event.fire_time
        # Record what happens #
        self.current = None
        if event.kind == 'deliver':
            msg = event.payload
            rid = self.trace.add(self.now, 'deliver', cause=event.record,
                                 at=str(event.target), src=str(event.source),
                                 link=event.link, msg=msg.__class__.__name__,
                                 digest=event.digest,
                                 scope=scope_label(getattr(msg, 'scope', None)))
        elif event.kind == 'timer':
            rid = self.trace.add(self.now, 'timer', cause=event.record,
                                 at=str(event.target),
                                 timer=str(event.payload))
        else:
            rid = self.trace.add(self.now, 'call', at=str(event.target),
                                 label=str(event.payload.get('label')))
        # Dispatch #
        self.current = rid
        endpoint = self.endpoint(event.target)
        if event.kind == 'deliver':  endpoint.on_message(event.payload, event.source)
        elif event.kind == 'timer':  endpoint.on_timer(event.payload)
        else:                        endpoint.on_call(event.payload)
        self.current = None
        return event

    def run(self, horizon=None):
        """
        Process events until none remain (quiescent) or the next one lies
        beyond the horizon. Returns the trace.
        """
        # Describe the run once #
        if not self.trace.records:
            self.trace.add(0, 'meta', **self.describe())
        horizon = horizon if horizon is not None else self.horizon
        # Main loop #
        self.status = 'quiescent'
        while self.queue:
            if horizon is not None and self.queue[0].fire_time > horizon:
                self.status = 'horizon'
                break
            self.step()
        # Close the trace #
        self.snapshot()
        self.trace.add(self.now, 'end', status=self.status,
                       choices=[pick for count, pick in self.choices])
        if self.verbose:
            print("Simulation ended at time %i (%s) with %s records." %
                  (self.now, self.status, thousands(len(self.trace.records))))
        return self.trace

    def describe(self):
        """Content of the leading meta record."""
        params = self.params
        result = {'n': params.n, 'f': params.f, 'p': params.p,
                  'delta': params.delta_bound, 'gst': params.gst,
                  'seed': self.seed, 'mode': self.delays.mode,
                  'byzantine': sorted(i for i, node in self.nodes.items()
                                      if node.byzantine)}
        result.update(self.meta)
        return result

    def snapshot(self):
        """Dump every entity state at the end of the run."""
        for index in sorted(self.nodes):
            for state in self.nodes[index].snapshot():
                self.trace.add(self.now, 'snapshot', **state)
