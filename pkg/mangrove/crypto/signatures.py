#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Simulated signatures: a signature is an HMAC-SHA256 of the message bytes
keyed with the signer's secret seed. Byzantine validators only ever hold
their own key pair, so they cannot produce a signature in the name of an
honest participant.
"""

# Built-in modules #
import hmac, hashlib
from dataclasses import dataclass

# Internal modules #
from mangrove.core.votes import Vote, DecisionProof

# First party modules #

# Third party modules #

###############################################################################
class AggregationError(ValueError):
    """Raised when a set of votes cannot form a decision proof."""
    pass

###############################################################################
@dataclass(frozen=True)
class KeyPair:
    public: str
    seed:   bytes

    def __repr__(self): return '<KeyPair "%s">' % self.public

def sign(key, msg):
    """Deterministic for a given (seed, msg) pair."""
    return hmac.new(key.seed, msg, hashlib.sha256).hexdigest()

def validator_public(index):
    return 'V%i' % index

###############################################################################
class Keyring:
    """
    Registry of every key pair in a simulation. It plays the role of a
    public key infrastructure: anyone can verify, but signing requires the
    key pair object itself.
    """

    def __repr__(self):
        return '<%s object with %i keys>' % (self.__class__.__name__,
                                             len(self.keys))

    def __init__(self, master_seed=0):
        self.master_seed = master_seed
        self.keys = {}

    def __contains__(self, public): return public in self.keys

    #------------------------------- Methods ---------------------------------#
    def generate(self, public):
        """Create (or return the existing) key pair for `public`."""
        if public not in self.keys:
            material = ('%s:%s' % (self.master_seed, public)).encode()
            seed     = hashlib.sha256(material).digest()
            self.keys[public] = KeyPair(public, seed)
        return self.keys[public]

    def validator_key(self, index):
        return self.generate(validator_public(index))

    def verify(self, public, msg, signature):
        # Unknown signers and missing signatures never verify #
        key = self.keys.get(public)
        if key is None or not isinstance(signature, str): return False
        # Recompute #
        return hmac.compare_digest(sign(key, msg), signature)

    #-------------------------------- Votes ----------------------------------#
    def vote(self, key, index, scope, value):
        """Sign a vote as validator `index`."""
        return Vote(scope, value, index, sign(key, Vote.message(scope, value)))

    def verify_vote(self, vote):
        return self.verify(validator_public(vote.voter),
                           Vote.message(vote.scope, vote.value),
                           vote.signature)

    #---------------------------- Transactions -------------------------------#
    def sign_tx(self, key, tx):
        return tx.signed_with(sign(key, tx.signing_bytes))

    def verify_tx(self, tx):
        """User transactions must be signed by their sender's key."""
        if not tx.is_user: return True
        return self.verify(tx.sender.name, tx.signing_bytes,
                           getattr(tx, 'signature', None))

###############################################################################
def aggregate(votes, quorums, keyring):
    """
    Turn at least `quorums.fast` votes for one value into a proof.
    Raises an AggregationError when the votes cannot form one.
    """
    # Order by voter so the proof bytes are canonical #
    votes = sorted(votes, key=lambda v: v.voter)
    if not votes: raise AggregationError("No votes to aggregate.")
    # One scope and one non-bottom value #
    scope, value = votes[0].scope, votes[0].value
    if value is None:
        raise AggregationError("The ⊥ vote cannot be aggregated.")
    for vote in votes:
        if vote.scope != scope or vote.value != value:
            msg = "Vote from validator %i is for a different scope or value."
            raise AggregationError(msg % vote.voter)
    # Voters must be distinct #
    voters = [v.voter for v in votes]
    if len(set(voters)) != len(voters):
        raise AggregationError("Duplicate voter among %s." % voters)
    # Signatures must verify #
    for vote in votes:
        if not keyring.verify_vote(vote):
            msg = "Invalid signature on the vote of validator %i."
            raise AggregationError(msg % vote.voter)
    # Threshold #
    if len(votes) < quorums.fast:
        msg = "Only %i votes were given but %i are needed."
        raise AggregationError(msg % (len(votes), quorums.fast))
    # Return #
    return DecisionProof(scope, value, tuple(votes))

def verify_proof(proof, quorums, keyring, scope=None, value=None):
    """
    Recompute every signature, the distinctness of voters and the fast
    quorum count. Optionally also pin the expected scope and value.
    """
    if scope is not None and proof.scope != scope: return False
    if value is not None and proof.value != value: return False
    if proof.value is None: return False
    voters = set()
    for vote in proof.votes:
        if vote.scope != proof.scope or vote.value != proof.value: return False
        if vote.voter in voters: return False
        if not keyring.verify_vote(vote): return False
        voters.add(vote.voter)
    return len(voters) >= quorums.fast
