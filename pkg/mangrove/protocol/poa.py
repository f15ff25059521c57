#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Parallel Optimistic Agreement: one instance per (reactive actor, k) at
each V.X.

Fast path: the leader proposes its pool, every validator FP-locks the
UA-RA transactions of the proposal at their senders and votes for the
block (or ⊥) together with its own pool as fallback block. n−p matching
votes decide and the proof is gossiped.

Slow path: once the 3Δ timer expired and n−f votes are in, a block with
n−p−2f votes is SP-locked and proposed to Quorum Consensus, otherwise
the transactions present in n−2f fallback blocks are. The decided QC
block then goes through Transaction Agreement for each UA-RA
transaction, and those that lose are removed.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.transactions import Block, listing
from mangrove.core.votes        import POA, scope
from mangrove.crypto.signatures import aggregate, verify_proof, validator_public
from mangrove.protocol.messages import (PoaProposal, PoaVote, PoaProof,
                                        FpLockReq, SpLockReq, UaInitiate)

# First party modules #

# Third party modules #

###############################################################################
class LeaderOracle:
    """Round-robin: instance k is led by validator k mod n, for every actor."""

    def __init__(self, n): self.n = n

    def __call__(self, actor, k): return k % self.n

###############################################################################
class PoaInstance:
    """State of instance `k`, owned by a ReactiveActorEntity."""

    def __repr__(self):
        return '<%s object on "%s/%i">' % (self.__class__.__name__,
                                           self.entity.name, self.k)

    def __init__(self, entity, k):
        # Save attributes #
        self.entity = entity
        self.k      = k
        self.scope  = scope(POA, entity.name, k)
        self.leader = entity.oracle(entity.name, k)
        # Life cycle #
        self.started = False
        self.touched = False
        self.timer   = None
        self.expired = False
        self.decided = None
        # Fast path #
        self.proposal   = None
        self.votes      = {}
        self.records    = {}
        self.blocks     = {}
        self.fallbacks  = {}
        self.proof      = None
        self.gossiped   = False
        self.voted      = False
        self.fp_replies = None
        # Slow path #
        self.slow_started = False
        self.candidate    = None
        self.sp_replies   = None
        self.need_fb      = False
        self.candidate_2  = None
        self.sp_replies_2 = None
        self.qc_proposed  = False
        self.qc_block     = None
        self.ta_replies   = None

    #----------------------------- Properties --------------------------------#
    @property
    def timeout(self): return 3 * self.entity.params.delta_bound

    @property
    def is_leader(self): return self.leader == self.entity.index

    def valid_block(self, block):
        return isinstance(block, Block) and block.actor == self.entity.name \
               and block.instance == self.k

    def tally(self):
        counts = {}
        for voter in sorted(self.votes):
            value = self.votes[voter].value
            if value is not None: counts.setdefault(value, []).append(voter)
        return counts

    #------------------------------ Life cycle -------------------------------#
    def start(self):
        """Initiate: restart the timer and propose the pool if leading."""
        entity = self.entity
        self.started = True
        self.timer   = entity.set_timer(self.timeout, ('poa', self.k))
        entity.record('initiate', scope=self.scope, leader=self.leader,
                      pool=sorted(entity.pool))
        if not self.is_leader: return
        block   = Block(entity.name, self.k, frozenset(entity.pool.values()))
        message = PoaProposal.message(self.scope, block.block_hash)
        entity.broadcast(PoaProposal(self.scope, block, entity.index,
                                     entity.sign(message)))

    #------------------------------ Receiving --------------------------------#
    def on_proposal(self, msg, src):
        self.touched = True
        if self.proposal is not None: return
        if src.node != self.leader or msg.leader != self.leader: return
        if not self.valid_block(msg.block): return
        message = PoaProposal.message(self.scope, msg.block.block_hash)
        if not self.entity.keyring.verify(validator_public(self.leader),
                                          message, msg.signature): return
        self.proposal = msg.block

    def on_vote(self, msg, src):
        self.touched = True
        vote = msg.vote
        if vote.scope != self.scope or vote.voter != src.node: return
        if vote.voter in self.votes: return
        if not self.entity.keyring.verify_vote(vote): return
        if vote.value is not None:
            if not self.valid_block(msg.block): return
            if msg.block.block_hash != vote.value: return
            self.blocks.setdefault(vote.value, msg.block)
        self.votes[vote.voter]     = vote
        self.records[vote.voter]   = self.entity.sim.current
        self.fallbacks[vote.voter] = frozenset(msg.fallback)

    def on_proof(self, msg, src):
        self.touched = True
        if self.proof is not None or not self.valid_block(msg.block): return
        entity = self.entity
        if not verify_proof(msg.proof, entity.quorums, entity.keyring,
                            self.scope, msg.block.block_hash): return
        self.proof = (msg, entity.sim.current)

    def on_fp_reply(self, msg):
        """Replies arriving after the vote was cast are discarded."""
        if self.voted or self.fp_replies is None: return
        if self.fp_replies.get(msg.tx_id, False) is None:
            self.fp_replies[msg.tx_id] = bool(msg.status)

    def on_sp_reply(self, msg):
        replies = self.sp_replies if msg.phase == 1 else self.sp_replies_2
        if replies is not None and replies.get(msg.tx_id, False) is None:
            replies[msg.tx_id] = bool(msg.status)

    def on_ta_result(self, msg):
        if self.ta_replies is not None and \
           self.ta_replies.get(msg.tx_id, False) is None:
            self.ta_replies[msg.tx_id] = bool(msg.success)

    def on_timer(self):
        self.expired = True
        self.timer   = None

    #-------------------------------- Rules ----------------------------------#
    def poll(self):
        """Apply every rule whose guard holds, in order."""
        if self.decided is not None: return
        if self.decide_by_proof(): return
        if self.decide_fast(): return
        if not self.started: return
        self.vote()
        self.slow_path()
        self.after_qc()

    def decide_by_proof(self):
        if self.proof is None: return False
        msg, record = self.proof
        if not self.gossiped:
            self.gossiped = True
            self.entity.broadcast(PoaProof(self.scope, msg.block, msg.proof))
        self.decide(msg.block, 'proof', [record])
        return True

    def decide_fast(self):
        entity = self.entity
        counts = self.tally()
        for value in sorted(counts):
            voters = counts[value]
            if len(voters) < entity.quorums.fast: continue
            proof = aggregate([self.votes[v] for v in voters], entity.quorums,
                              entity.keyring)
            block = self.blocks[value]
            self.gossiped = True
            entity.broadcast(PoaProof(self.scope, block, proof))
            self.decide(block, 'fast', [self.records[v] for v in voters])
            return True
        return False

    def vote(self):
        """FP-lock the proposal, then vote once on the complete replies."""
        if self.voted: return
        entity = self.entity
        # Start the FP-lock round when the proposal is usable #
        if self.fp_replies is None and self.proposal is not None \
           and not self.expired:
            if all(tx.tx_id in entity.pool for tx in self.proposal.ra_ra):
                requests = self.proposal.ua_ra
                self.fp_replies = {tx.tx_id: None for tx in requests}
                for tx in requests:
                    entity.send_local(tx.sender.name, FpLockReq(self.scope, tx))
        # All replies are in #
        if self.fp_replies is not None:
            if any(r is None for r in self.fp_replies.values()): return
            ok = all(self.fp_replies.values())
            return self.cast(self.proposal if ok else None)
        # No usable proposal before the timer expired #
        if self.expired: return self.cast(None)

    def cast(self, block):
        entity = self.entity
        value  = block.block_hash if block is not None else None
        vote   = entity.keyring.vote(entity.key, entity.index, self.scope, value)
        self.voted = True
        entity.broadcast(PoaVote(self.scope, vote, block,
                                 frozenset(entity.pool.values())))

    def slow_path(self):
        entity  = self.entity
        quorums = entity.quorums
        # Trigger #
        if not self.slow_started and self.expired and \
           len(self.votes) >= quorums.round_votes:
            self.slow_started = True
            counts = self.tally()
            best = [(-len(v), h) for h, v in counts.items()
                    if len(v) >= quorums.slow_trigger]
            if best:
                self.candidate  = self.blocks[min(best)[1]]
                self.sp_replies = self.sp_lock(self.candidate.ua_ra, 1)
            else:
                self.need_fb = True
        # The candidate block was SP-locked #
        if self.sp_replies is not None and not self.need_fb and \
           not self.qc_proposed and None not in self.sp_replies.values():
            if all(self.sp_replies.values()): self.propose(self.candidate)
            else:                             self.need_fb = True
        # Fallback blocks #
        if self.need_fb and self.candidate_2 is None:
            counts, content = {}, {}
            for voter in sorted(self.fallbacks):
                for tx in self.fallbacks[voter]:
                    counts[tx.tx_id] = counts.get(tx.tx_id, 0) + 1
                    content.setdefault(tx.tx_id, tx)
            self.candidate_2 = [content[i] for i in sorted(counts)
                                if counts[i] >= quorums.fallback]
            uaras = [tx for tx in self.candidate_2 if tx.kind == 'ua-ra']
            self.sp_replies_2 = self.sp_lock(uaras, 2)
        if self.sp_replies_2 is not None and not self.qc_proposed and \
           None not in self.sp_replies_2.values():
            txs = [tx for tx in self.candidate_2 if
                   (tx.kind == 'ua-ra' and self.sp_replies_2[tx.tx_id]) or
                   tx.kind == 'ra-ra']
            self.propose(Block(entity.name, self.k, frozenset(txs)))

    def sp_lock(self, txs, phase):
        replies = {tx.tx_id: None for tx in txs}
        for tx in txs:
            self.entity.send_local(tx.sender.name,
                                   SpLockReq(self.scope, tx, phase))
        return replies

    def propose(self, block):
        self.qc_proposed = True
        self.entity.qc(self.k).propose(block)

    def after_qc(self):
        """Transaction Agreement for every UA-RA transaction of the QC block."""
        entity = self.entity
        qc = entity.consensus.get(self.k)
        if self.ta_replies is None:
            if qc is None or not qc.decided: return
            self.qc_block   = qc.decision
            self.ta_replies = {tx.tx_id: None for tx in self.qc_block.ua_ra}
            for tx in self.qc_block.ua_ra:
                entity.send_local(tx.sender.name, UaInitiate(self.scope, tx))
        if None in self.ta_replies.values(): return
        failed = [tx for tx in self.qc_block.ua_ra
                  if not self.ta_replies[tx.tx_id]]
        self.decide(self.qc_block.without(failed), 'slow',
                    [entity.sim.current])

    def decide(self, block, path, deps):
        self.decided = block
        if self.timer is not None:
            self.entity.cancel_timer(self.timer)
            self.timer = None
        self.entity.record('decide', scope=self.scope, value=block.block_hash,
                           txs=listing(block), path=path, leader=self.leader,
                           deps=deps)
