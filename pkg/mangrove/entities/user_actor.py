#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The entity V.A of a validator for the user actor A. It owns the lock
registry (FPLocked and SPLocked, write-once per sequence number), the
objects A owns according to this validator, and which sequence numbers
were executed. UA transactions are decided by POB and executed here,
UA-RA transactions are forwarded to the reactive actor's entity and
settled when their effects come back.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.votes         import TA
from mangrove.protocol           import messages
from mangrove.protocol.messages  import (ClientNotice, UaVote, UaProof,
                                         UaRaForward, Executed, Credit,
                                         FpLockReq, FpLockResp, SpLockReq,
                                         SpLockResp, UaInitiate, TaResult)
from mangrove.protocol.pob       import PobInstance
from mangrove.protocol.quorum    import TransactionAgreement
from mangrove.entities.entity    import Entity
from mangrove.vm.machine         import execute_user_tx

# First party modules #

# Third party modules #

###############################################################################
class UserActorEntity(Entity):

    consensus_class = TransactionAgreement
    consensus_kind  = TA

    def __init__(self, node, actor, objects=()):
        super().__init__(node, actor)
        # Lock registry #
        self.fp_locked = {}
        self.sp_locked = {}
        # What happened #
        self.executed  = {}
        self.owned     = {o.object_id: o for o in objects}
        self.pending   = {}
        self.settling  = {}
        self.forwards  = {}
        # Waiting for preconditions within the grace period #
        self.fp_waits  = {}
        # Protocol instances #
        self.instances   = {}
        self.initiations = {}
        # Signed transactions seen per slot #
        self.seen     = {}
        self.evidence = set()

    #----------------------------- Properties --------------------------------#
    def pob(self, sn):
        if sn not in self.instances: self.instances[sn] = PobInstance(self, sn)
        return self.instances[sn]

    def owns(self, obj):
        return self.owned.get(obj.object_id) == obj

    def ready(self, tx):
        """Predecessor executed and every consumed object owned."""
        if tx.sn > 0 and (tx.sn - 1) not in self.executed: return False
        return all(self.owns(o) for o in tx.consumed)

    def valid(self, tx, kinds):
        if tx is None or tx.kind not in kinds: return False
        if tx.sender.name != self.name: return False
        if not isinstance(tx.sn, int) or tx.sn < 0: return False
        return self.keyring.verify_tx(tx)

    #-------------------------------- Locks ----------------------------------#
    def fp_lock_slot(self, tx):
        """Set FPLocked if empty, True when the slot holds `tx`."""
        current = self.fp_locked.get(tx.sn)
        if current is not None: return current == tx
        self.fp_locked[tx.sn] = tx
        self.record('fp_lock', sn=tx.sn, tx=tx.tx_id)
        return True

    def sp_lock_slot(self, tx):
        """Set SPLocked if empty, True when the slot holds `tx`."""
        current = self.sp_locked.get(tx.sn)
        if current is not None: return current == tx
        self.sp_locked[tx.sn] = tx
        self.record('sp_lock', sn=tx.sn, tx=tx.tx_id)
        return True

    def ta_propose(self, sn):
        self.qc(sn).propose(self.sp_locked[sn])

    #------------------------------ Evidence ---------------------------------#
    def observe_tx(self, tx):
        """Two signed conflicting transactions for one slot are evidence."""
        if not self.valid(tx, ('ua', 'ua-ra')): return
        slot = self.seen.setdefault(tx.sn, {})
        slot.setdefault(tx.tx_id, tx)
        if len(slot) > 1 and tx.sn not in self.evidence:
            self.evidence.add(tx.sn)
            self.record('evidence', sn=tx.sn, txs=sorted(slot))

    #------------------------------ Receiving --------------------------------#
    def handle(self, msg, src):
        if isinstance(msg, messages.UaTx):
            self.observe_tx(msg.tx)
            if msg.tx.kind == 'ua':  self.pob(msg.tx.sn).on_tx(msg.tx)
            else:                    self.uara_forward(msg.tx)
        elif isinstance(msg, UaVote):
            if msg.tx is not None: self.observe_tx(msg.tx)
            self.pob(msg.scope[2]).on_vote(msg, src)
        elif isinstance(msg, UaProof):
            self.pob(msg.scope[2]).on_proof(msg, src)
        elif isinstance(msg, FpLockReq):  self.on_fp_request(msg, src)
        elif isinstance(msg, SpLockReq):  self.on_sp_request(msg, src)
        elif isinstance(msg, UaInitiate): self.on_initiate(msg, src)
        elif isinstance(msg, Executed):   self.on_executed(msg)
        elif isinstance(msg, Credit):     self.on_credit(msg)

    def uara_forward(self, tx):
        """FP-lock a UA-RA transaction from the client and queue it."""
        if not self.valid(tx, ('ua-ra',)): return
        if tx.sn in self.executed or tx.sn in self.forwards: return
        if not self.fp_lock_slot(tx):
            self.record('drop', tx=tx.tx_id, sn=tx.sn, reason='fp-conflict')
            return
        self.forwards[tx.sn] = tx

    def on_fp_request(self, msg, src):
        tx = msg.tx
        if not self.valid(tx, ('ua-ra',)) or not self.fp_lock_slot(tx):
            return self.send(src, FpLockResp(msg.scope, tx.tx_id, False))
        if self.ready(tx):
            return self.send(src, FpLockResp(msg.scope, tx.tx_id, True))
        # Grace period of Δ for the preconditions #
        key = (msg.scope, tx.tx_id)
        if key in self.fp_waits: return
        handle = self.set_timer(self.params.delta_bound,
                                ('fp', msg.scope, tx.tx_id))
        self.fp_waits[key] = (tx, src, handle)

    def on_sp_request(self, msg, src):
        tx = msg.tx
        status = self.valid(tx, ('ua-ra',)) and self.sp_lock_slot(tx)
        self.send(src, SpLockResp(msg.scope, tx.tx_id, msg.phase, status))

    def on_initiate(self, msg, src):
        """SP-lock if the slot is free and run Transaction Agreement on it."""
        tx = msg.tx
        if not self.valid(tx, ('ua-ra',)):
            return self.send(src, TaResult(msg.scope, tx.tx_id, False))
        self.sp_lock_slot(tx)
        agreement = self.qc(tx.sn)
        agreement.propose(self.sp_locked[tx.sn])
        if agreement.decided:
            success = agreement.decision == tx
            return self.send(src, TaResult(msg.scope, tx.tx_id, success))
        self.initiations.setdefault(tx.sn, []).append((src, msg.scope, tx))

    def on_executed(self, msg):
        tx = msg.tx
        if not self.valid(tx, ('ua-ra',)): return
        if tx.sn in self.executed or tx.sn in self.settling: return
        self.settling[tx.sn] = msg

    def on_credit(self, msg):
        new = [o for o in msg.objects if o.object_id not in self.owned]
        for obj in new: self.owned[obj.object_id] = obj
        self.record('credit', tx=msg.tx_id,
                    objects=[o.summary() for o in new])
        self.notify(self.name, ClientNotice(self.name, 'credit', msg.tx_id,
                                            created=tuple(new)))

    def timer(self, timer_id):
        if timer_id[0] == 'pob':
            self.pob(timer_id[1]).on_timer()
        elif timer_id[0] == 'fp':
            wait = self.fp_waits.pop((timer_id[1], timer_id[2]), None)
            if wait is None: return
            tx, src, handle = wait
            self.send(src, FpLockResp(timer_id[1], tx.tx_id, False))

    #------------------------------ Callbacks --------------------------------#
    def pob_decided(self, instance, tx):
        if tx.sn not in self.executed: self.pending[tx.sn] = tx

    def qc_decided(self, agreement):
        """Transaction Agreement decided the value of one slot."""
        tx = agreement.decision
        if tx.kind == 'ua': self.pob(tx.sn).on_agreement(tx)
        for src, ta_scope, wanted in self.initiations.pop(tx.sn, []):
            self.send(src, TaResult(ta_scope, wanted.tx_id, wanted == tx))

    #-------------------------------- Rules ----------------------------------#
    def poll(self):
        """Apply rules until nothing changes any more."""
        changed = True
        while changed:
            self.poll_consensus()
            for sn in sorted(self.instances): self.instances[sn].poll()
            changed = self.answer_waits() | self.forward() | \
                      self.execute_pending() | self.settle()

    def answer_waits(self):
        done = [k for k in sorted(self.fp_waits) if self.ready(self.fp_waits[k][0])]
        for key in done:
            tx, src, handle = self.fp_waits.pop(key)
            self.cancel_timer(handle)
            self.send(src, FpLockResp(key[0], tx.tx_id, True))
        return bool(done)

    def forward(self):
        """Hand UA-RA transactions whose preconditions hold to their RA."""
        done = [sn for sn in sorted(self.forwards)
                if self.ready(self.forwards[sn])]
        for sn in done:
            tx = self.forwards.pop(sn)
            self.send_local(tx.recipient.name, UaRaForward(tx))
        return bool(done)

    def execute_pending(self):
        changed = False
        for sn in sorted(self.pending):
            tx = self.pending[sn]
            if sn in self.executed:
                self.pending.pop(sn)
                self.record('drop', tx=tx.tx_id, sn=sn, reason='slot-executed')
                continue
            if not self.ready(tx): continue
            self.pending.pop(sn)
            self.ua_execute(tx)
            changed = True
        return changed

    def ua_execute(self, tx):
        """Run the code of a decided UA transaction."""
        effects = execute_user_tx(tx, self.node.resolve)
        for obj in tx.consumed: self.owned.pop(obj.object_id, None)
        self.executed[tx.sn] = tx.tx_id
        for actor, program, state in effects.actors:
            self.node.spawn_reactive(actor, program, state)
        mine = self.distribute(tx.tx_id, effects.created)
        self.record('execute', tx=tx.tx_id, tx_kind=tx.kind, sender=self.name,
                    sn=tx.sn, actor=self.name, consumed=list(tx.consumed_ids),
                    created=[o.summary() for o in effects.created],
                    spawned=[a.name for a, p, s in effects.actors],
                    failed=effects.failed, error=effects.error,
                    burned=effects.burned, minted=effects.minted)
        self.notify(self.name, ClientNotice(self.name, 'executed', tx.tx_id,
                                            tx.sn, tuple(mine),
                                            tx.consumed_ids))

    def distribute(self, tx_id, created):
        """Keep our objects, credit the others over Inner Links."""
        mine, others = [], {}
        for obj in created:
            if obj.owner.name == self.name: mine.append(obj)
            else: others.setdefault(obj.owner.name, []).append(obj)
        for obj in mine: self.owned[obj.object_id] = obj
        for name in sorted(others):
            self.send_local(name, Credit(tx_id, tuple(others[name])))
        return mine

    def settle(self):
        """Apply the effects of executed UA-RA transactions in order."""
        changed = False
        for sn in sorted(self.settling):
            msg = self.settling[sn]
            if not self.ready(msg.tx): continue
            self.settling.pop(sn)
            tx = msg.tx
            for obj in tx.consumed: self.owned.pop(obj.object_id, None)
            for obj in msg.created: self.owned[obj.object_id] = obj
            self.executed[sn] = tx.tx_id
            self.forwards.pop(sn, None)
            self.record('settle', tx=tx.tx_id, sn=sn, failed=msg.failed,
                        consumed=list(tx.consumed_ids),
                        created=[o.summary() for o in msg.created])
            self.notify(self.name, ClientNotice(self.name, 'executed', tx.tx_id,
                                                sn, tuple(msg.created),
                                                tx.consumed_ids))
            changed = True
        return changed

    #------------------------------- Output ----------------------------------#
    def snapshot(self):
        return {'at':        str(self.address),
                'actor':     self.name,
                'role':      'user',
                'executed':  [[sn, self.executed[sn]] for sn in sorted(self.executed)],
                'fp_locked': [[sn, self.fp_locked[sn].tx_id] for sn in sorted(self.fp_locked)],
                'sp_locked': [[sn, self.sp_locked[sn].tx_id] for sn in sorted(self.sp_locked)],
                'owned':     [self.owned[i].summary() for i in sorted(self.owned)]}
