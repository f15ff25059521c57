#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Parallel Optimistic Broadcast: one instance per (user actor, sn) at each
V.A. Votes are FP-lock gated, n−p matching votes decide with a proof
that is gossiped once, and n−p−2f matching votes feed Transaction
Agreement once the instance timer (2Δ from first contact) has expired.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.transactions import listing
from mangrove.core.votes        import POB, scope
from mangrove.crypto.signatures import aggregate, verify_proof
from mangrove.protocol.messages import UaVote, UaProof

# First party modules #

# Third party modules #

###############################################################################
class PobInstance:
    """State of one broadcast instance, owned by a UserActorEntity."""

    def __repr__(self):
        return '<%s object on "%s/%i">' % (self.__class__.__name__,
                                           self.entity.name, self.sn)

    def __init__(self, entity, sn):
        # Save attributes #
        self.entity = entity
        self.sn     = sn
        self.scope  = scope(POB, entity.name, sn)
        # State #
        self.votes     = {}
        self.records   = {}
        self.txs       = {}
        self.decided   = None
        self.gossiped  = False
        self.timer     = None
        self.expired   = False
        self.triggered = set()
        self.voted     = False
        self.voted_for = None
        self.refused   = False

    #----------------------------- Properties --------------------------------#
    @property
    def timeout(self): return 2 * self.entity.params.delta_bound

    def valid_tx(self, tx):
        """Right slot and a valid signature from the sender."""
        if tx is None or tx.kind != 'ua': return False
        if tx.sender.name != self.entity.name or tx.sn != self.sn: return False
        return self.entity.keyring.verify_tx(tx)

    def tally(self):
        """Map of tx id to the voters for it, ⊥ votes excluded."""
        counts = {}
        for voter in sorted(self.votes):
            value = self.votes[voter].value
            if value is not None: counts.setdefault(value, []).append(voter)
        return counts

    #------------------------------ Receiving --------------------------------#
    def touch(self):
        """The instance timer starts at first contact."""
        if self.timer is None and not self.expired:
            self.timer = self.entity.set_timer(self.timeout, ('pob', self.sn))

    def on_tx(self, tx):
        """A client broadcast reached us: FP-lock and vote."""
        if self.decided is not None or not self.valid_tx(tx): return
        self.touch()
        self.txs.setdefault(tx.tx_id, tx)
        if self.voted:
            # A conflicting version after our vote is refused once with ⊥ #
            if self.voted_for in (None, tx.tx_id) or self.refused: return
            self.refused = True
            return self.send_vote(None, None)
        self.voted = True
        if self.entity.fp_lock_slot(tx): self.send_vote(tx.tx_id, tx)
        else:                            self.send_vote(None, None)

    def send_vote(self, value, carried):
        entity = self.entity
        if not self.refused: self.voted_for = value
        vote = entity.keyring.vote(entity.key, entity.index, self.scope, value)
        entity.broadcast(UaVote(self.scope, vote, carried))

    def on_vote(self, msg, src):
        vote = msg.vote
        if vote.scope != self.scope or vote.voter != src.node: return
        if vote.voter in self.votes: return
        if not self.entity.keyring.verify_vote(vote): return
        if vote.value is not None:
            if msg.tx is None or msg.tx.tx_id != vote.value: return
            if not self.valid_tx(msg.tx): return
            self.txs.setdefault(msg.tx.tx_id, msg.tx)
        self.votes[vote.voter]   = vote
        self.records[vote.voter] = self.entity.sim.current
        if self.decided is None: self.touch()

    def on_proof(self, msg, src):
        """A valid proof decides an undecided instance, gossiped once."""
        if self.decided is not None or not self.valid_tx(msg.tx): return
        entity = self.entity
        if not verify_proof(msg.proof, entity.quorums, entity.keyring,
                            self.scope, msg.tx.tx_id): return
        if not self.gossiped:
            self.gossiped = True
            entity.broadcast(UaProof(self.scope, msg.tx, msg.proof))
        self.decide(msg.tx, 'proof', [entity.sim.current])

    def on_timer(self):
        self.expired = True
        self.timer   = None

    def on_agreement(self, tx):
        """Transaction Agreement decided `tx` for our slot."""
        if self.decided is not None or tx.kind != 'ua': return
        self.decide(tx, 'slow', [self.entity.sim.current])

    #-------------------------------- Rules ----------------------------------#
    def poll(self):
        if self.decided is not None: return
        entity = self.entity
        counts = self.tally()
        # Fast path #
        for value in sorted(counts):
            voters = counts[value]
            if len(voters) < entity.quorums.fast: continue
            proof = aggregate([self.votes[v] for v in voters], entity.quorums,
                              entity.keyring)
            tx = self.txs[value]
            self.gossiped = True
            entity.broadcast(UaProof(self.scope, tx, proof))
            self.decide(tx, 'fast', [self.records[v] for v in voters])
            return
        # Slow path, only once the timer expired #
        if not self.expired: return
        for value in sorted(counts):
            if value in self.triggered: continue
            if len(counts[value]) < entity.quorums.slow_trigger: continue
            self.triggered.add(value)
            tx = self.txs[value]
            if not entity.sp_lock_slot(tx): continue
            entity.ta_propose(self.sn)

    def decide(self, tx, path, deps):
        self.decided = tx
        if self.timer is not None:
            self.entity.cancel_timer(self.timer)
            self.timer = None
        self.entity.record('decide', scope=self.scope, value=tx.tx_id,
                           txs=listing(tx), path=path, deps=deps)
        self.entity.pob_decided(self, tx)
