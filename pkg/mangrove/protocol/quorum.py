#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Quorum Consensus: a single-shot, view based, partially synchronous
Byzantine consensus whose leader value is derived from the proposals.

Every replica broadcasts a signed proposal. The leader of a view sends a
value together with its justification, replicas that can recompute the
justification prepare it, n−f prepares lock it and trigger a commit, and
n−f commits decide it. A replica whose view timer expires broadcasts a
view change carrying its lock (with the prepares that certify it) and
its own signed proposal. The leader of a later view must re-propose the
highest lock carried by n−f view changes, or derive a fresh value when
none of them carries a lock.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.serialization import digest
from mangrove.core.transactions  import (Block, Transaction, NoTransaction,
                                         listing, value_hash)
from mangrove.crypto.signatures  import sign, validator_public
from mangrove.protocol.messages  import (QcProposal, QcLeaderValue, QcPrepare,
                                         QcCommit, QcViewChange, QcDecideCert)

# First party modules #

# Third party modules #

###############################################################################
class QuorumConsensus:
    """
    One instance per scope per entity. The hosting `entity` provides the
    identity, the links, the timers and receives `qc_decided(self)`.
    Subclasses define `derive` and `valid_value`.
    """

    def __repr__(self):
        return '<%s object on "%s" view %i>' % (self.__class__.__name__,
                                                 '/'.join(map(str, self.scope)),
                                                 self.view)

    def __init__(self, entity, scope):
        # Save attributes #
        self.entity  = entity
        self.scope   = scope
        self.params  = entity.params
        self.quorums = entity.quorums
        self.keyring = entity.keyring
        self.me      = entity.index
        # Where the leader rotation starts for this scope #
        self.offset = int(digest(scope)[:8], 16) % self.params.n
        # State #
        self.view         = 0
        self.started      = False
        self.my_proposal  = None
        self.proposals    = {}
        self.leader_vals  = {}
        self.led          = set()
        self.prepared     = set()
        self.committed    = set()
        self.prepares     = {}
        self.commits      = {}
        self.values       = {}
        self.view_changes = {}
        self.highest_vc   = {}
        self.sent_vc      = set()
        self.lock         = None
        self.decision     = None
        self.timer        = None

    #----------------------------- Properties --------------------------------#
    @property
    def decided(self): return self.decision is not None

    @property
    def lock_view(self): return self.lock[0] if self.lock else -1

    def leader_of(self, view):
        return (self.offset + view) % self.params.n

    def timeout(self, view):
        return 4 * self.params.delta_bound * 2 ** view

    #------------------------------ Overrides --------------------------------#
    def derive(self, values):
        """The leader value for a collection of proposed values, or None."""
        raise NotImplementedError

    def valid_value(self, value):
        return True

    #--------------------------------- API -----------------------------------#
    def propose(self, value):
        """Broadcast our signed proposal, a second call is ignored."""
        if self.my_proposal is not None or self.decided: return
        signature = self.sign(QcProposal.message(self.scope, value_hash(value)))
        self.my_proposal = QcProposal(self.scope, value, self.me, signature)
        self.entity.record('propose', scope=self.scope, value=value_hash(value),
                           txs=listing(value))
        self.entity.broadcast(self.my_proposal)
        # Start the view timer #
        self.started = True
        if self.timer is None: self.start_timer()

    def handle(self, msg, src):
        """Store an incoming message after checking it."""
        if self.decided: return
        if   isinstance(msg, QcProposal):    self.on_proposal(msg, src)
        elif isinstance(msg, QcLeaderValue): self.on_leader_value(msg, src)
        elif isinstance(msg, QcPrepare):     self.on_prepare(msg, src)
        elif isinstance(msg, QcCommit):      self.on_commit(msg, src)
        elif isinstance(msg, QcViewChange):  self.on_view_change(msg, src)
        elif isinstance(msg, QcDecideCert):  self.on_decide_cert(msg, src)

    def timer_fired(self, view):
        """The timer of `view` expired."""
        if self.decided or view != self.view: return
        self.timer = None
        self.enter_view(view + 1)

    def poll(self):
        """Apply every rule whose guard holds."""
        if self.decided: return
        self.join_higher_view()
        self.lead()
        self.prepare()
        self.commit()
        self.try_decide()

    #------------------------------- Helpers ---------------------------------#
    def sign(self, msg):
        return sign(self.entity.key, msg)

    def verify(self, voter, msg, signature):
        return self.keyring.verify(validator_public(voter), msg, signature)

    def start_timer(self):
        self.timer = self.entity.set_timer(self.timeout(self.view),
                                           ('qc', self.scope, self.view))

    def remember(self, value):
        key = value_hash(value)
        self.values.setdefault(key, value)
        return key

    #------------------------------ Checking ---------------------------------#
    def check_proposal(self, msg):
        if not isinstance(msg, QcProposal) or msg.scope != self.scope:
            return False
        if not self.valid_value(msg.value): return False
        message = QcProposal.message(self.scope, value_hash(msg.value))
        return self.verify(msg.voter, message, msg.signature)

    def check_votes(self, votes, cls, view, key):
        """At least n−f distinct valid votes of type `cls` for (view, key)."""
        voters = set()
        for vote in votes:
            if not isinstance(vote, cls) or vote.scope != self.scope: return False
            if vote.view != view or value_hash(vote.value) != key: return False
            if vote.voter in voters: return False
            if not self.verify(vote.voter, cls.message(self.scope, view, key),
                               vote.signature): return False
            voters.add(vote.voter)
        return len(voters) >= self.quorums.round_votes

    def check_view_change(self, msg):
        if msg.scope != self.scope: return False
        lock_key = value_hash(msg.lock) if msg.lock is not None else None
        message = QcViewChange.message(self.scope, msg.view, msg.lock_view,
                                       lock_key)
        if not self.verify(msg.voter, message, msg.signature): return False
        if msg.lock_view >= 0:
            if msg.lock is None or not self.valid_value(msg.lock): return False
            if not self.check_votes(msg.lock_cert, QcPrepare, msg.lock_view,
                                    lock_key): return False
        if msg.proposal is not None:
            if msg.proposal.voter != msg.voter: return False
            if not self.check_proposal(msg.proposal): return False
        return True

    def check_derivation(self, proposals, value):
        """n−f distinct valid proposals whose derivation is `value`."""
        voters = set()
        for proposal in proposals:
            if proposal.voter in voters: return False
            if not self.check_proposal(proposal): return False
            voters.add(proposal.voter)
        if len(voters) < self.quorums.round_votes: return False
        derived = self.derive([p.value for p in proposals])
        return derived is not None and value_hash(derived) == value_hash(value)

    def highest_lock(self, view_changes):
        """The (lock_view, lock) to re-propose, (-1, None) without locks."""
        best = max((vc.lock_view for vc in view_changes), default=-1)
        if best < 0: return -1, None
        locks = {value_hash(vc.lock): vc.lock for vc in view_changes
                 if vc.lock_view == best}
        if len(locks) != 1: return best, False
        return best, list(locks.values())[0]

    def check_leader_value(self, msg, src):
        if msg.scope != self.scope or msg.view < 0: return False
        if src.node != msg.leader or msg.leader != self.leader_of(msg.view):
            return False
        if not self.valid_value(msg.value): return False
        message = QcLeaderValue.message(self.scope, msg.view,
                                        value_hash(msg.value))
        if not self.verify(msg.leader, message, msg.signature): return False
        # View zero derives from proposals #
        if msg.view == 0: return self.check_derivation(msg.proposals, msg.value)
        # Later views need n−f view changes for that view #
        voters = set()
        for vc in msg.view_changes:
            if vc.view != msg.view or vc.voter in voters: return False
            if not self.check_view_change(vc): return False
            voters.add(vc.voter)
        if len(voters) < self.quorums.round_votes: return False
        lock_view, lock = self.highest_lock(msg.view_changes)
        if lock is False: return False
        if lock is not None: return value_hash(lock) == value_hash(msg.value)
        return self.check_derivation(msg.proposals, msg.value)

    #------------------------------ Receiving --------------------------------#
    def on_proposal(self, msg, src):
        if src.node != msg.voter or msg.voter in self.proposals: return
        if not self.check_proposal(msg): return
        self.proposals[msg.voter] = msg

    def on_leader_value(self, msg, src):
        if msg.view in self.leader_vals: return
        if not self.check_leader_value(msg, src): return
        self.leader_vals[msg.view] = msg
        self.remember(msg.value)

    def on_vote(self, msg, src, store, cls):
        if src.node != msg.voter or msg.scope != self.scope: return
        if not self.valid_value(msg.value): return
        key = value_hash(msg.value)
        if not self.verify(msg.voter, cls.message(self.scope, msg.view, key),
                           msg.signature): return
        votes = store.setdefault((msg.view, key), {})
        if msg.voter in votes: return
        votes[msg.voter] = msg
        self.remember(msg.value)

    def on_prepare(self, msg, src): self.on_vote(msg, src, self.prepares, QcPrepare)
    def on_commit(self, msg, src):  self.on_vote(msg, src, self.commits, QcCommit)

    def on_view_change(self, msg, src):
        if src.node != msg.voter: return
        per_view = self.view_changes.setdefault(msg.view, {})
        if msg.voter in per_view: return
        if not self.check_view_change(msg): return
        per_view[msg.voter] = msg
        self.highest_vc[msg.voter] = max(msg.view,
                                         self.highest_vc.get(msg.voter, -1))
        # Proposals carried inside view changes count as received #
        if msg.proposal is not None and msg.voter not in self.proposals:
            self.proposals[msg.voter] = msg.proposal

    def on_decide_cert(self, msg, src):
        if msg.scope != self.scope or not msg.commits: return
        if not self.valid_value(msg.value): return
        view = msg.commits[0].view
        if not self.check_votes(msg.commits, QcCommit, view,
                                value_hash(msg.value)): return
        self.decide(msg.value, view, msg.commits)

    #-------------------------------- Rules ----------------------------------#
    def enter_view(self, view):
        """Move to `view`, announce it and restart the timer."""
        if view <= self.view and view in self.sent_vc: return
        self.view    = view
        self.started = True
        self.sent_vc.add(view)
        lock_view, lock, cert = self.lock if self.lock else (-1, None, ())
        lock_key  = value_hash(lock) if lock is not None else None
        message   = QcViewChange.message(self.scope, view, lock_view, lock_key)
        vc = QcViewChange(self.scope, view, lock_view, lock, tuple(cert),
                          self.my_proposal, self.me, self.sign(message))
        self.entity.broadcast(vc)
        if self.timer is not None: self.entity.cancel_timer(self.timer)
        self.start_timer()

    def join_higher_view(self):
        """f+1 replicas ahead of us pull us to the (f+1)-th highest view."""
        ahead = sorted((v for v in self.highest_vc.values() if v > self.view),
                       reverse=True)
        if len(ahead) < self.params.f + 1: return
        target = ahead[self.params.f]
        if target > self.view: self.enter_view(target)

    def lead(self):
        """Send the leader value of the current view when we lead it."""
        view = self.view
        if self.leader_of(view) != self.me or view in self.led: return
        view_changes = ()
        value        = None
        if view > 0:
            view_changes = sorted(self.view_changes.get(view, {}).values(),
                                  key=lambda vc: vc.voter)
            if len(view_changes) < self.quorums.round_votes: return
            lock_view, lock = self.highest_lock(view_changes)
            if lock is False: return
            value = lock
        proposals = ()
        if value is None:
            known = sorted(self.proposals.values(), key=lambda p: p.voter)
            if len(known) < self.quorums.round_votes: return
            proposals = self.entity.node.select_proposals(
                known, self.quorums.round_votes, self.derive)
            value = self.derive([p.value for p in proposals])
            if value is None: return
        # Send #
        self.led.add(view)
        message = QcLeaderValue.message(self.scope, view, value_hash(value))
        self.entity.broadcast(QcLeaderValue(self.scope, view, value,
                                            tuple(proposals),
                                            tuple(view_changes), self.me,
                                            self.sign(message)))

    def prepare(self):
        view = self.view
        if view in self.prepared or view not in self.leader_vals: return
        self.prepared.add(view)
        value   = self.leader_vals[view].value
        message = QcPrepare.message(self.scope, view, value_hash(value))
        self.entity.broadcast(QcPrepare(self.scope, view, value, self.me,
                                        self.sign(message)))

    def commit(self):
        view = self.view
        if view in self.committed: return
        for (v, key), votes in sorted(self.prepares.items()):
            if v != view or len(votes) < self.quorums.round_votes: continue
            value = self.values[key]
            cert  = tuple(votes[i] for i in sorted(votes))
            self.lock = (view, value, cert)
            self.committed.add(view)
            message = QcCommit.message(self.scope, view, key)
            self.entity.broadcast(QcCommit(self.scope, view, value, self.me,
                                           self.sign(message)))
            return

    def try_decide(self):
        for (view, key), votes in sorted(self.commits.items()):
            if len(votes) < self.quorums.round_votes: continue
            cert = tuple(votes[i] for i in sorted(votes))
            self.decide(self.values[key], view, cert)
            return

    def decide(self, value, view, commits):
        """Decide once and hand the certificate to everybody."""
        if self.decided: return
        self.decision = value
        if self.timer is not None:
            self.entity.cancel_timer(self.timer)
            self.timer = None
        self.entity.record('decide', scope=self.scope, value=value_hash(value),
                           txs=listing(value), path='view-%i' % view)
        self.entity.broadcast(QcDecideCert(self.scope, value, tuple(commits)))
        self.entity.qc_decided(self)

###############################################################################
class BlockConsensus(QuorumConsensus):
    """Quorum Consensus over blocks of one POA instance."""

    def __init__(self, entity, scope):
        super().__init__(entity, scope)
        self.actor, self.instance = scope[1], scope[2]

    def derive(self, values):
        """Every transaction present in at least n−2f of the proposals."""
        counts, content = {}, {}
        for block in values:
            for tx in block.txs:
                counts[tx.tx_id] = counts.get(tx.tx_id, 0) + 1
                content.setdefault(tx.tx_id, tx)
        threshold = self.quorums.fallback
        chosen = [content[i] for i in sorted(counts) if counts[i] >= threshold]
        return Block(self.actor, self.instance, frozenset(chosen))

    def valid_value(self, value):
        return isinstance(value, Block) and value.actor == self.actor and \
               value.instance == self.instance

###############################################################################
class TransactionAgreement(QuorumConsensus):
    """
    Quorum Consensus over single transactions for one (user, sn) slot.
    The leader value is the transaction carried by the most proposals,
    provided it was carried at least n−2f times: at most f carriers are
    Byzantine, so at least n−3f honest validators proposed it. Ties go to
    the smallest id. When n−f proposals back no transaction that strongly
    the value is NoTransaction, which honest proposals agreeing on one
    transaction can never produce.
    """

    def __init__(self, entity, scope):
        super().__init__(entity, scope)
        self.actor, self.sn = scope[1], scope[2]

    def derive(self, values):
        if len(values) < self.quorums.round_votes: return None
        counts, content = {}, {}
        for tx in values:
            if not isinstance(tx, Transaction): continue
            counts[tx.tx_id] = counts.get(tx.tx_id, 0) + 1
            content.setdefault(tx.tx_id, tx)
        best = max(counts.values(), default=0)
        if best < self.quorums.fallback: return NoTransaction(self.actor, self.sn)
        return content[min(i for i in counts if counts[i] == best)]

    def valid_value(self, value):
        if isinstance(value, NoTransaction):
            return value.actor == self.actor and value.sn == self.sn
        if not getattr(value, 'is_user', False): return False
        if value.sender.name != self.actor or value.sn != self.sn: return False
        return self.keyring.verify_tx(value)
