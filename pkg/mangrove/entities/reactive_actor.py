#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The entity V.X of a validator for the reactive actor X. Transactions
addressed to X wait in its pool, one POA instance after the other
decides a block of them, and every block is executed in canonical order
before the next instance is initiated.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.transactions import RaRaTx
from mangrove.core.votes        import QC
from mangrove.protocol.messages import (UaRaForward, RaRaDelivery, Executed,
                                        Credit, PoaProposal, PoaVote, PoaProof,
                                        FpLockResp, SpLockResp, TaResult)
from mangrove.protocol.poa      import PoaInstance
from mangrove.protocol.quorum   import BlockConsensus
from mangrove.entities.entity   import Entity
from mangrove.vm.machine        import execute_reactive_tx
from mangrove.vm.programs       import get_program

# First party modules #

# Third party modules #

###############################################################################
class ReactiveActorEntity(Entity):

    consensus_class = BlockConsensus
    consensus_kind  = QC

    def __init__(self, node, actor, program, state=None, objects=()):
        super().__init__(node, actor)
        # The program and its state #
        self.program  = get_program(program)
        self.ra_state = self.program.initial_state(state)
        self.oracle   = node.oracle
        # Objects and transactions #
        self.owned    = {o.object_id: o for o in objects}
        self.pool     = {}
        self.attempts = {}
        self.executed = set()
        self.rejected = set()
        self.order    = []
        # Instances #
        self.k         = 0
        self.instances = {}

    def instance(self, k):
        if k not in self.instances: self.instances[k] = PoaInstance(self, k)
        return self.instances[k]

    #------------------------------ Receiving --------------------------------#
    def handle(self, msg, src):
        if isinstance(msg, (UaRaForward, RaRaDelivery)): return self.add(msg.tx)
        if isinstance(msg, Credit):
            for obj in msg.objects: self.owned[obj.object_id] = obj
            return self.record('credit', tx=msg.tx_id,
                               objects=[o.summary() for o in msg.objects])
        # Everything else belongs to an instance, old ones are closed #
        k = msg.scope[2] if getattr(msg, 'scope', None) else None
        if k is None or k < self.k: return
        instance = self.instance(k)
        if   isinstance(msg, PoaProposal): instance.on_proposal(msg, src)
        elif isinstance(msg, PoaVote):     instance.on_vote(msg, src)
        elif isinstance(msg, PoaProof):    instance.on_proof(msg, src)
        elif isinstance(msg, FpLockResp):  instance.on_fp_reply(msg)
        elif isinstance(msg, SpLockResp):  instance.on_sp_reply(msg)
        elif isinstance(msg, TaResult):    self.on_ta_result(instance, msg)

    def on_ta_result(self, instance, msg):
        """The slot was decided against the transaction, it can never execute."""
        instance.on_ta_result(msg)
        if msg.success: return
        self.rejected.add(msg.tx_id)
        if self.pool.pop(msg.tx_id, None) is not None:
            self.record('unpool', tx=msg.tx_id)

    def add(self, tx):
        """A transaction enters the pool at most once."""
        if tx.recipient.name != self.name: return
        if tx.tx_id in self.executed or tx.tx_id in self.pool: return
        if tx.tx_id in self.rejected: return
        self.pool[tx.tx_id] = tx
        self.record('pool', tx=tx.tx_id, tx_kind=tx.kind)

    def timer(self, timer_id):
        if timer_id[0] == 'poa' and timer_id[1] in self.instances:
            self.instances[timer_id[1]].on_timer()

    #-------------------------------- Rules ----------------------------------#
    def poll(self):
        """Run the current instance, execute and advance while it decides."""
        while True:
            self.poll_consensus()
            instance = self.instance(self.k)
            if not instance.started and instance.proof is None and \
               (instance.touched or self.fresh_pool()):
                self.start(instance)
            instance.poll()
            if instance.decided is None: return
            self.execute_block(instance.decided)
            self.advance()

    def fresh_pool(self):
        """
        Some pooled tx was offered to fewer than f+2 instances here since
        GST. Instances started before GST are not counted.
        """
        limit = self.params.f + 2
        return any(self.attempts.get(i, 0) < limit for i in self.pool)

    def start(self, instance):
        if self.sim.now < self.params.gst: return instance.start()
        for tx_id in self.pool:
            self.attempts[tx_id] = self.attempts.get(tx_id, 0) + 1
        instance.start()

    def advance(self):
        """Drop what was executed from the pool and move to the next k."""
        for tx_id in list(self.pool):
            if tx_id in self.executed: self.pool.pop(tx_id)
        self.instances.pop(self.k, None)
        self.k += 1

    #------------------------------ Execution --------------------------------#
    def execute_block(self, block):
        for tx in block.canonical_order:
            if tx.tx_id in self.executed: continue
            if tx.recipient.name != self.name: continue
            self.executed.add(tx.tx_id)
            self.order.append(tx.tx_id)
            self.execute(tx, block.instance)

    def execute(self, tx, k):
        holdings = [self.owned[i] for i in sorted(self.owned)]
        effects  = execute_reactive_tx(tx, self.program, self.ra_state,
                                       holdings, self.actor, self.node.resolve)
        # Apply #
        if not effects.failed:
            self.ra_state = effects.state
            for object_id in effects.spent: self.owned.pop(object_id, None)
            for obj in effects.absorbed:    self.owned[obj.object_id] = obj
            for obj in effects.created:
                if obj.owner == self.actor: self.owned[obj.object_id] = obj
        self.record('execute', tx=tx.tx_id, tx_kind=tx.kind,
                    sender=tx.sender.name, sn=tx.sn, actor=self.name,
                    instance=k, consumed=list(tx.consumed_ids),
                    created=[o.summary() for o in effects.created],
                    failed=effects.failed, error=effects.error,
                    burned=effects.burned, minted=effects.minted,
                    state=self.ra_state)
        # Emissions #
        for i, template in enumerate(effects.rara): self.emit(tx, i, template)
        # Settlement at user actors #
        users = {}
        for obj in effects.created:
            if obj.owner.is_user: users.setdefault(obj.owner.name, []).append(obj)
        if tx.kind == 'ua-ra':
            mine = tuple(users.pop(tx.sender.name, ()))
            self.send_local(tx.sender.name, Executed(tx, mine, effects.failed))
        for name in sorted(users):
            self.send_local(name, Credit(tx.tx_id, tuple(users[name])))

    def emit(self, parent, index, template):
        """Deduct the consumed objects and send, or drop the template."""
        recipient = self.node.resolve(template.recipient)
        missing   = [i for i in template.consumed if i not in self.owned]
        if recipient is None or not recipient.is_reactive or missing:
            reason = 'not-owned' if missing else 'bad-recipient'
            self.record('emit_error', parent=parent.tx_id, index=index,
                        recipient=template.recipient, missing=missing,
                        reason=reason)
            return
        consumed = tuple(self.owned.pop(i) for i in template.consumed)
        tx = RaRaTx(self.actor, recipient, consumed, template.call,
                    tuple(template.code_post),
                    origin='%s:%i' % (parent.tx_id, index))
        self.record('emit', tx=tx.tx_id, tx_kind=tx.kind, sender=self.name,
                    recipient=recipient.name, consumed=list(tx.consumed_ids),
                    parent=parent.tx_id)
        self.send_local(recipient.name, RaRaDelivery(tx))

    #------------------------------- Output ----------------------------------#
    def snapshot(self):
        return {'at':       str(self.address),
                'actor':    self.name,
                'role':     'reactive',
                'program':  self.program.name,
                'state':    self.ra_state,
                'instance': self.k,
                'executed': list(self.order),
                'pool':     sorted(self.pool),
                'owned':    [self.owned[i].summary() for i in sorted(self.owned)]}
