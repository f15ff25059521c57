#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Byzantine behaviors. A Byzantine validator runs the honest entities but
hands everything it sends to another validator to its strategy, which
returns what is actually sent. Strategies only ever sign with their own
validator's key, they cannot forge anybody else's signature. Every
arbitrary pick goes through `sim.choose` so that runs are replayable.
"""

# Built-in modules #
import itertools

# Internal modules #
from mangrove.core.transactions import Block, RaRaTx, value_hash
from mangrove.crypto.signatures import sign
from mangrove.protocol.messages import (UaTx, UaVote, PoaProposal, PoaVote,
                                        QcProposal)
from mangrove.network.simulator import Address

# First party modules #

# Third party modules #

###############################################################################
class Strategy:
    """Honest by default, subclasses override what they corrupt."""

    name = None

    def __repr__(self):
        return '<%s object "%s">' % (self.__class__.__name__, self.name)

    def __init__(self, **options):
        self.options = options

    def outgoing(self, node, src, dst, msg):
        """A list of (destination, message) pairs to send instead of `msg`."""
        return [(dst, msg)]

    def observe(self, node, msg):
        pass

    def release(self, node):
        pass

    def select_proposals(self, node, known, need, derive):
        return list(known)

###############################################################################
class Silent(Strategy):
    """Never sends anything to another validator or to a client."""

    name = 'silent'

    def outgoing(self, node, src, dst, msg): return []

###############################################################################
class EquivocateVotes(Strategy):
    """
    Votes for a different value per destination in POB and POA, picking
    among every value seen in that scope and ⊥.
    """

    name = 'equivocate-votes'

    def __init__(self, **options):
        super().__init__(**options)
        self.seen = {}

    def observe(self, node, msg):
        if isinstance(msg, UaTx) and msg.scope is not None:
            self.remember(msg.scope, msg.tx)
        elif isinstance(msg, UaVote) and msg.tx is not None:
            self.remember(msg.scope, msg.tx)
        elif isinstance(msg, PoaProposal):
            self.remember(msg.scope, msg.block)
        elif isinstance(msg, PoaVote) and msg.block is not None:
            self.remember(msg.scope, msg.block)

    def remember(self, scope, value):
        values = self.seen.setdefault(scope, [])
        if value not in values: values.append(value)

    def outgoing(self, node, src, dst, msg):
        if not isinstance(msg, (UaVote, PoaVote)): return [(dst, msg)]
        # Candidates #
        own = msg.tx if isinstance(msg, UaVote) else msg.block
        options = [None] + sorted(self.seen.get(msg.scope, []),
                                  key=value_hash)
        if own is not None and own not in options: options.append(own)
        value = options[node.sim.choose(len(options), 'equivocate')]
        # Re-sign with our own key #
        vote = node.sim.keyring.vote(node.key, node.index, msg.scope,
                                     value_hash(value) if value else None)
        if isinstance(msg, UaVote):
            return [(dst, UaVote(msg.scope, vote, value))]
        return [(dst, PoaVote(msg.scope, vote, value, msg.fallback))]

###############################################################################
class ConflictingProposals(Strategy):
    """
    As POA leader sends the honest block, an empty block or the block
    minus one transaction, chosen per destination. Quorum Consensus
    proposals of blocks get the same treatment.
    """

    name = 'conflicting-proposals'

    @staticmethod
    def variants(block):
        empty = Block(block.actor, block.instance, frozenset())
        result = [block, empty]
        if len(block.txs) > 1:
            result.append(block.without([block.canonical_order[0]]))
        return result

    def outgoing(self, node, src, dst, msg):
        if isinstance(msg, PoaProposal):
            options = self.variants(msg.block)
            block   = options[node.sim.choose(len(options), 'conflicting')]
            message = PoaProposal.message(msg.scope, block.block_hash)
            return [(dst, PoaProposal(msg.scope, block, msg.leader,
                                      sign(node.key, message)))]
        if isinstance(msg, QcProposal) and isinstance(msg.value, Block):
            options = self.variants(msg.value)
            block   = options[node.sim.choose(len(options), 'conflicting')]
            message = QcProposal.message(msg.scope, value_hash(block))
            return [(dst, QcProposal(msg.scope, block, msg.voter,
                                     sign(node.key, message)))]
        return [(dst, msg)]

###############################################################################
class WithholdThenRelease(Strategy):
    """
    Holds back every message until the `release` time, GST+5Δ unless
    given, and then sends all of them at once.
    """

    name = 'withhold-then-release'

    def __init__(self, **options):
        super().__init__(**options)
        self.held      = []
        self.scheduled = set()

    def release_time(self, node):
        params = node.sim.params
        return self.options.get('release', params.gst + 5 * params.delta_bound)

    def outgoing(self, node, src, dst, msg):
        when = self.release_time(node)
        if node.sim.now >= when: return [(dst, msg)]
        self.held.append((src, dst, msg))
        if src not in self.scheduled:
            self.scheduled.add(src)
            node.sim.call_at(when, Address(node.index, src.actor),
                             {'label': 'release'})
        return []

    def release(self, node):
        held, self.held = self.held, []
        for src, dst, msg in held: node.sim.send(src, dst, msg)

###############################################################################
class ArbitraryJustified(Strategy):
    """
    As Quorum Consensus leader, justifies its value with an arbitrary
    subset of the proposals it knows instead of all of them.
    """

    name = 'arbitrary-justified'

    def select_proposals(self, node, known, need, derive):
        subsets = list(itertools.islice(itertools.combinations(known, need),
                                        self.options.get('limit', 32)))
        if not subsets: return list(known)
        return list(subsets[node.sim.choose(len(subsets), 'justify')])

###############################################################################
class BadLeader(Strategy):
    """As POA leader adds an RA-RA transaction nobody emitted."""

    name = 'bad-leader'

    def outgoing(self, node, src, dst, msg):
        if not isinstance(msg, PoaProposal): return [(dst, msg)]
        block  = msg.block
        actor  = node.resolve(block.actor)
        forged = RaRaTx(actor, actor, (), None, (),
                        origin='forged:%i' % block.instance)
        block   = Block(block.actor, block.instance, block.txs | {forged})
        message = PoaProposal.message(msg.scope, block.block_hash)
        return [(dst, PoaProposal(msg.scope, block, msg.leader,
                                  sign(node.key, message)))]

###############################################################################
strategies = {cls.name: cls for cls in (Silent, EquivocateVotes,
                                        ConflictingProposals,
                                        WithholdThenRelease,
                                        ArbitraryJustified, BadLeader)}

def make_strategy(spec):
    """A strategy from its name or from a mapping with `name` and options."""
    if isinstance(spec, str): spec = {'name': spec}
    spec = dict(spec)
    name = spec.pop('name', None)
    if name not in strategies:
        msg = "Unknown Byzantine strategy '%s', expected one of %s."
        raise ValueError(msg % (name, sorted(strategies)))
    return strategies[name](**spec)
