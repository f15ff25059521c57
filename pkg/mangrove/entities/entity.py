#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio
"""

# Built-in modules #

# Internal modules #
from mangrove.core.votes        import QC, TA, scope
from mangrove.crypto.signatures import sign
from mangrove.network.simulator import Address

# First party modules #

# Third party modules #

###############################################################################
class Entity:
    """
    The state machine of validator `node` for one actor. Subclasses
    implement `handle`, `timer` and `poll`. Every incoming event is
    handled first and then `poll` re-evaluates every rule whose guard
    might have changed.
    """

    consensus_class = None
    consensus_kind  = None

    def __repr__(self):
        return '<%s object "%s">' % (self.__class__.__name__, self.address)

    def __init__(self, node, actor):
        # Save attributes #
        self.node    = node
        self.actor   = actor
        self.name    = actor.name
        # Shortcuts #
        self.sim     = node.sim
        self.params  = node.sim.params
        self.quorums = node.sim.quorums
        self.keyring = node.sim.keyring
        self.index   = node.index
        self.key     = node.key
        self.address = Address(node.index, actor.name)
        # Quorum Consensus instances by number #
        self.consensus = {}

    #------------------------------ Messaging --------------------------------#
    def send(self, dst, msg):
        self.node.send(self.address, dst, msg)

    def send_local(self, actor_name, msg):
        """Inner Link to another entity of the same validator."""
        self.send(Address(self.index, actor_name), msg)

    def broadcast(self, msg):
        """The same message to the entity of our actor at every validator."""
        for i in range(self.params.n): self.send(Address(i, self.name), msg)

    def notify(self, actor_name, notice):
        """Tell the client controlling `actor_name`, if there is one."""
        client = self.node.world.controller(actor_name)
        if client is not None: self.node.send_client(self.address, client, notice)

    #-------------------------------- Timers ---------------------------------#
    def set_timer(self, duration, timer_id):
        return self.sim.set_timer(self.address, duration, timer_id)

    def cancel_timer(self, handle):
        self.sim.cancel_timer(handle)

    #------------------------------- Helpers ---------------------------------#
    def record(self, kind, scope=None, deps=None, **fields):
        return self.sim.record(kind, at=self.address, deps=deps, scope=scope,
                               **fields)

    def sign(self, msg):
        return sign(self.key, msg)

    def qc(self, number):
        """The consensus instance for `number`, created on first use."""
        if number not in self.consensus:
            self.consensus[number] = self.consensus_class(
                self, scope(self.consensus_kind, self.name, number))
        return self.consensus[number]

    def qc_decided(self, instance):
        pass

    #------------------------------- Events ----------------------------------#
    def on_message(self, msg, src):
        self.node.observe(msg)
        target = getattr(msg, 'scope', None)
        if target is not None and target[0] in (QC, TA) and \
           msg.__class__.__name__.startswith('Qc'):
            self.qc(target[2]).handle(msg, src)
        else:
            self.handle(msg, src)
        self.poll()

    def on_timer(self, timer_id):
        if timer_id[0] == 'qc':
            self.qc(timer_id[1][2]).timer_fired(timer_id[2])
        else:
            self.timer(timer_id)
        self.poll()

    def on_call(self, payload):
        if payload.get('label') == 'release': self.node.release()
        self.poll()

    def poll_consensus(self):
        for number in sorted(self.consensus):
            instance = self.consensus[number]
            if not instance.decided: instance.poll()

    #------------------------------ Overrides --------------------------------#
    def handle(self, msg, src): pass

    def timer(self, timer_id): pass

    def poll(self): self.poll_consensus()

    def snapshot(self):
        return {'at': str(self.address), 'actor': self.name}
